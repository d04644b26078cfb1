#pragma once

#include <memory>
#include <string>
#include <vector>

#include "evorank/errors.hpp"
#include "evorank/http_backend.hpp"
#include "evorank/score_cache.hpp"
#include "evorank/scripted_backend.hpp"
#include "evorank/tempralm_backend.hpp"

namespace evorank {

enum class BackendKind { scripted, http, tempralm };

// Declarative backend description, mostly fed from the CLI. tempralm wraps
// the configuration named by `inner` (scripted when absent).
struct BackendConfig {
    BackendKind kind = BackendKind::scripted;
    std::string endpoint;
    int timeout_ms = 30000;
    int max_retries = 3;
    std::vector<std::string> trigger_tokens = {"recent", "up-to-date", "latest", "current"};
    double temporal_weight = 0.3;
    double horizon_days = 365.0;
    double lambda = 0.2;
    std::shared_ptr<const BackendConfig> inner;

    void validate() const {
        if (timeout_ms <= 0) {
            throw validation_error(validation_code::invalid_config,
                                   "backend timeout must be positive");
        }
        if (max_retries < 0) {
            throw validation_error(validation_code::invalid_config,
                                   "max_retries must be >= 0");
        }
        if (temporal_weight < 0.0 || temporal_weight > 1.0) {
            throw validation_error(validation_code::invalid_config,
                                   "temporal_weight must lie in [0, 1]");
        }
        if (lambda < 0.0) {
            throw validation_error(validation_code::invalid_config, "lambda must be >= 0");
        }
        if (kind == BackendKind::http && endpoint.empty()) {
            throw validation_error(validation_code::invalid_config,
                                   "http backend requires an endpoint");
        }
        if (inner) inner->validate();
    }
};

inline std::shared_ptr<const Backend> make_backend(const BackendConfig& config) {
    config.validate();
    switch (config.kind) {
    case BackendKind::scripted: {
        ScriptedConfig sc;
        sc.temporal_weight = config.temporal_weight;
        sc.horizon_days = config.horizon_days;
        sc.trigger_tokens = config.trigger_tokens;
        return std::make_shared<ScriptedBackend>(std::move(sc));
    }
    case BackendKind::http: {
        HttpConfig hc;
        hc.endpoint = config.endpoint;
        hc.timeout_ms = config.timeout_ms;
        hc.max_retries = config.max_retries;
        return std::make_shared<HttpBackend>(std::move(hc));
    }
    case BackendKind::tempralm: {
        std::shared_ptr<const Backend> inner;
        if (config.inner) {
            inner = make_backend(*config.inner);
        } else {
            inner = std::make_shared<ScriptedBackend>();
        }
        return std::make_shared<TempRalmBackend>(std::move(inner), config.lambda);
    }
    }
    throw validation_error(validation_code::invalid_config, "unknown backend kind");
}

} // namespace evorank
