#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <unistd.h>
#include <string>

#include "hitchplan/hitchplan.hpp"

namespace testing_support
{
    inline std::filesystem::path scenario(const std::string &name)
    {
        return std::filesystem::path(HITCHPLAN_SCENARIO_DIR) / name;
    }

    /// Fresh, empty directory under the system temp dir.
    inline std::filesystem::path temp_dir(const std::string &tag)
    {
        static std::atomic<int> counter{0};
        const auto dir = std::filesystem::temp_directory_path() /
                         ("hitchplan_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(dir);
        std::filesystem::create_directories(dir);
        return dir;
    }

    inline std::string slurp(const std::filesystem::path &p)
    {
        std::ifstream is(p, std::ios::binary);
        std::ostringstream ss;
        ss << is.rdbuf();
        return ss.str();
    }

    /// Deterministic uniform draws.
    class Sampler
    {
      public:
        explicit Sampler(unsigned seed) : rng_(seed) {}
        double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
        int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
        std::mt19937 &engine() { return rng_; }

      private:
        std::mt19937 rng_;
    };

    inline double deg(double d) { return hitchplan::deg_to_rad(d); }
} // namespace testing_support
