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

#include <liver/service.hpp>

#include <httplib.h>

namespace liver {

void mount(httplib::Server& server, Service& service, const std::string& static_dir) {
    auto handler = [&service](const httplib::Request& hreq, httplib::Response& hres) {
        Request req{hreq.method, hreq.path, {}, hreq.body};
        for (const auto& [k, v] : hreq.params) req.query[k] = v;
        Response res = service.handle(req);
        hres.status = res.status;
        if (!res.body.empty() || res.status != 204) hres.set_content(res.body, res.content_type);
    };
    const std::string pattern = R"(/api/v1/.*)";
    server.Get(pattern, handler);
    server.Post(pattern, handler);
    server.Put(pattern, handler);
    server.Delete(pattern, handler);
    if (!static_dir.empty()) server.set_mount_point("/", static_dir);
}

}  // namespace liver
