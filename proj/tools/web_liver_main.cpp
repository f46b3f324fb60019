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
#include <liver/store.hpp>

#include <CLI11.hpp>
#include <httplib.h>

#include <cstdlib>
#include <iostream>

namespace {

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v && *v ? v : fallback;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"web-liver: HTTP workbench for risk classifiers"};
    std::string data = env_or("LIVER_DATA_DIR", "liver-data");
    std::string bind = env_or("LIVER_BIND", "127.0.0.1");
    int port = std::atoi(env_or("LIVER_PORT", "8080").c_str());
    std::string static_dir = env_or("LIVER_STATIC_DIR", "");
    app.add_option("--data-dir", data, "Store directory (env LIVER_DATA_DIR)")->capture_default_str();
    app.add_option("--bind", bind, "Bind address (env LIVER_BIND)")->capture_default_str();
    app.add_option("--port", port, "Port (env LIVER_PORT)")->capture_default_str();
    app.add_option("--static", static_dir, "Directory served at / (env LIVER_STATIC_DIR)");
    CLI11_PARSE(app, argc, argv);

    try {
        liver::Store store(data);
        liver::Service service(store);
        service.seed();
        httplib::Server server;
        liver::mount(server, service, static_dir);
        std::cerr << "web-liver: serving " << data << " on http://" << bind << ":" << port << "/api/v1\n";
        if (!server.listen(bind, port)) {
            std::cerr << "web-liver: cannot listen on " << bind << ":" << port << "\n";
            return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "web-liver: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
