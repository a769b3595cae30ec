#include "didecomp/ingestion.hpp"

#include "didecomp/errors.hpp"

#include <httplib.h>

namespace didecomp {

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string target;  // /path?query
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("URL '" + url + "' has no scheme");
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpGet make_http_get(std::chrono::seconds timeout) {
    return [timeout](const std::string& url) {
        HttpResponse out;
        SplitUrl parts;
        try {
            parts = split_url(url);
        } catch (const ConfigError& e) {
            out.error = e.what();
            return out;
        }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
        if (parts.origin.rfind("https://", 0) == 0) {
            out.error = "https endpoints need a build with OpenSSL";
            return out;
        }
#endif
        httplib::Client client(parts.origin);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_follow_location(true);
        auto res = client.Get(parts.target);
        if (!res) {
            out.error = httplib::to_string(res.error());
            return out;
        }
        out.status = res->status;
        out.body = std::move(res->body);
        return out;
    };
}

}  // namespace didecomp
