#ifndef ZVR_CONFIG_HPP
#define ZVR_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include "zvr/degradation.hpp"
#include "zvr/pipeline.hpp"

namespace zvr {

// Flat key/value run configuration. Defaults < config file < explicit
// overrides; unknown keys are rejected.
class RunConfig {
public:
    RunConfig();  // defaults

    void load_file(const std::string& path);
    void set(const std::string& key, const std::string& value);

    const std::string& get(const std::string& key) const;
    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    uint64_t get_u64(const std::string& key) const;
    bool get_bool(const std::string& key) const;

    const std::map<std::string, std::string>& values() const { return values_; }

    PipelineConfig pipeline_config() const;
    DegradationOp make_operator(const Dims4& video_dims) const;
    TaskKind task() const;

    static const std::vector<std::pair<std::string, std::string>>& known_keys();

private:
    std::map<std::string, std::string> values_;
};

}  // namespace zvr

#endif
