#pragma once
// Local stand-in for the Olinda annual-expectations service, replaying the
// recorded payloads under tests/fixtures/focus. Pages by $top/$skip like the
// real service; optional failure injection and nextLink paging.

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>

#ifndef DIDECOMP_FOCUS_FIXTURES
#error "DIDECOMP_FOCUS_FIXTURES must point at the recorded payload directory"
#endif

namespace testing_support {

inline std::filesystem::path focus_fixture(const std::string& name) {
    return std::filesystem::path(DIDECOMP_FOCUS_FIXTURES) / name;
}

inline std::string read_fixture(const std::string& name) {
    std::ifstream in(focus_fixture(name), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class FocusServer {
public:
    static constexpr const char* kPath = "/olinda/servico/Expectativas/versao/v1/odata/ExpectativasMercadoAnuais";

    FocusServer() {
        server_.Get(kPath, [this](const httplib::Request& req, httplib::Response& res) { handle(req, res); });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    FocusServer(const FocusServer&) = delete;
    FocusServer& operator=(const FocusServer&) = delete;
    ~FocusServer() {
        server_.stop();
        thread_.join();
    }

    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + kPath; }

    /// Serve this fixture file for every indicator, unpaged.
    void serve_only(const std::string& file) {
        std::lock_guard lk(mu_);
        override_file_ = file;
    }
    /// Answer the first `count` requests with `status` before behaving.
    void fail_first(int count, int status) {
        failures_left_ = count;
        failure_status_ = status;
    }
    /// Page with @odata.nextLink instead of relying on $skip arithmetic.
    void use_next_link(bool on) { next_link_ = on; }

    int requests() const { return requests_.load(); }

private:
    void handle(const httplib::Request& req, httplib::Response& res) {
        ++requests_;
        if (failures_left_.fetch_sub(1) > 0) {
            res.status = failure_status_;
            res.set_content("{\"error\":\"unavailable\"}", "application/json");
            return;
        }
        std::string file;
        {
            std::lock_guard lk(mu_);
            file = override_file_;
        }
        if (!file.empty()) {
            res.set_content(read_fixture(file), "application/json");
            return;
        }
        const std::string filter = req.get_param_value("$filter");
        static const std::map<std::string, std::string> kFiles = {
            {"IPCA", "IPCA.json"},
            {"Selic", "Selic.json"},
            {"PIB Total", "PIB.json"},
            {"Resultado primário", "Primario.json"},
            {"Resultado nominal", "Nominal.json"},
        };
        const auto open = filter.find("Indicador eq '");
        if (open == std::string::npos) {
            res.status = 400;
            return;
        }
        const auto start = open + 14;
        const auto name = filter.substr(start, filter.find('\'', start) - start);
        const auto it = kFiles.find(name);
        if (it == kFiles.end()) {
            res.status = 404;
            return;
        }
        auto doc = nlohmann::ordered_json::parse(read_fixture(it->second));
        const auto& all = doc["value"];
        const std::size_t top = req.has_param("$top") ? std::stoul(req.get_param_value("$top")) : all.size();
        const std::size_t skip = req.has_param("$skip") ? std::stoul(req.get_param_value("$skip")) : 0;
        nlohmann::ordered_json page = nlohmann::ordered_json::array();
        for (std::size_t i = skip; i < all.size() && i < skip + top; ++i) page.push_back(all[i]);
        nlohmann::ordered_json body;
        body["@odata.context"] = doc["@odata.context"];
        body["value"] = page;
        if (next_link_ && skip + top < all.size()) {
            std::string link = std::string(kPath) + "?$filter=" + httplib::detail::encode_query_param(filter) +
                               "&$top=" + std::to_string(top) + "&$skip=" + std::to_string(skip + top) +
                               "&$format=json";
            body["@odata.nextLink"] = link;
        }
        res.set_content(body.dump(), "application/json");
    }

    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::mutex mu_;
    std::string override_file_;
    std::atomic<int> failures_left_{0};
    int failure_status_ = 503;
    std::atomic<bool> next_link_{false};
    std::atomic<int> requests_{0};
};

}  // namespace testing_support
