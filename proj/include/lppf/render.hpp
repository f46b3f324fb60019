// Copyright 2026 The lppf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <lppf/ast.hpp>

#include <string>

namespace lppf {

// Canonical rendering. One statement per line; parse(render(p)) == p.

std::string render(const Program& program);
std::string render(const Rule& rule);
std::string render(const Directive& directive);
std::string render(const RuleHead& head);
std::string render(const BodyLiteral& literal);
std::string render(const Expression& expr);
std::string render(const Label& label);

}  // namespace lppf
