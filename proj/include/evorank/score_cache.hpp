#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>

#include "evorank/backend.hpp"
#include "evorank/digest.hpp"

namespace evorank {

// Memoizes backend scores keyed on (instruction digest, query id, candidate
// id). Reads are concurrent, writes serialized. The cache contents are
// plain data and travel inside run checkpoints, so resumed runs replay the
// exact scores of the interrupted one.
class CachedBackend : public Backend {
public:
    explicit CachedBackend(std::shared_ptr<const Backend> inner) : inner_(std::move(inner)) {}

    double score(const ScoreRequest& req) const override {
        const std::string key = cache_key(req);
        {
            std::shared_lock lock(mutex_);
            const auto it = cache_.find(key);
            if (it != cache_.end()) {
                hits_.fetch_add(1, std::memory_order_relaxed);
                return it->second;
            }
        }
        const double value = inner_->score(req);
        ++misses_;
        {
            std::unique_lock lock(mutex_);
            cache_.emplace(key, value);
        }
        return value;
    }

    std::string name() const override { return "cached(" + inner_->name() + ")"; }

    static std::string cache_key(const ScoreRequest& req) {
        // Fall back to text digests when ids are absent (bare score() calls).
        const std::string qid = req.query_id.empty() ? "q:" + digest_hex(req.query_text)
                                                     : req.query_id;
        const std::string cid = req.candidate_id.empty() ? "c:" + digest_hex(req.candidate_text)
                                                         : req.candidate_id;
        std::string key = digest_hex(req.instruction);
        key += '\x1f';
        key += qid;
        key += '\x1f';
        key += cid;
        return key;
    }

    std::map<std::string, double> snapshot() const {
        std::shared_lock lock(mutex_);
        return cache_;
    }

    void restore(std::map<std::string, double> entries) {
        std::unique_lock lock(mutex_);
        cache_ = std::move(entries);
    }

    std::size_t size() const {
        std::shared_lock lock(mutex_);
        return cache_.size();
    }

    std::uint64_t hit_count() const { return hits_.load(); }
    std::uint64_t miss_count() const { return misses_.load(); }

private:
    std::shared_ptr<const Backend> inner_;
    mutable std::shared_mutex mutex_;
    mutable std::map<std::string, double> cache_;
    mutable std::atomic<std::uint64_t> hits_{0};
    mutable std::atomic<std::uint64_t> misses_{0};
};

} // namespace evorank
