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

#include <liver/records.hpp>
#include <liver/store.hpp>

#include <functional>
#include <map>
#include <string>

namespace httplib {
class Server;
}

namespace liver {

struct Request {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
};

struct Response {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

/// Returns an ISO-8601 UTC timestamp.
using Clock = std::function<std::string()>;

std::string utc_now();

/// The /api/v1 surface, independent of any HTTP server.
class Service {
public:
    Service(Store& store, Clock clock = utc_now, Schema schema = Schema::canonical());

    /// Writes the built-in soft-fragment classifier and the "synthetic"
    /// dataset (76 cases, seed 42) when the store holds nothing yet.
    void seed();

    Response handle(const Request& request);

private:
    Store& store_;
    Clock clock_;
    Schema schema_;
};

/// Routes /api/v1/* to the service and serves `static_dir` (if not empty) at /.
void mount(httplib::Server& server, Service& service, const std::string& static_dir = "");

}  // namespace liver
