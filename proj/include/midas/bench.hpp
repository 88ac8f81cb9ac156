#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "midas/core.hpp"

namespace midas::bench {

// Object groupings: A=1 object ... D=4 objects.
enum class ArrangementGroup { A, B, C, D };

int object_count(ArrangementGroup g);
char arrangement_letter(ArrangementGroup g);

struct BenchConfig {
    std::vector<double> video_lengths_s = {30.0, 60.0, 90.0, 120.0};
    std::uint32_t fps_millihz = 30000;
    std::vector<ArrangementGroup> arrangements = {ArrangementGroup::A, ArrangementGroup::B,
                                                  ArrangementGroup::C, ArrangementGroup::D};
    bool include_agglomerated = true;
    int repetitions = 5;
    std::uint64_t rng_seed = 0;
    int width = 64; // wide enough for 4 dispersed spots
    int height = 30;

    void validate() const {
        if (video_lengths_s.empty())
            throw DomainError("need >= 1 video length");
        for (double l : video_lengths_s)
            if (l <= 0.0)
                throw DomainError("video lengths must be > 0");
        if (repetitions < 3)
            throw DomainError("repetitions must be >= 3");
        if (fps_millihz == 0)
            throw DomainError("fps_millihz must be > 0");
        if (arrangements.empty())
            throw DomainError("need >= 1 arrangement");
    }
};

struct BenchRow {
    double length_s = 0.0;
    ArrangementGroup arrangement = ArrangementGroup::A;
    bool agglomerated = false;
    std::size_t frames = 0;
    double median_ms = 0.0;
    double p10_ms = 0.0;
    double p90_ms = 0.0;
    std::size_t roi_count = 0;
};

// End-to-end timing of preprocess -> segment -> fingerprint -> predict per
// cell. Scene rendering and classifier training happen outside the clock;
// the first (warmup) repetition is discarded.
std::vector<BenchRow> run_bench(const BenchConfig& cfg);

// Tab-separated: length_s arrangement mode frames median_ms p10_ms p90_ms roi_count
void write_table(const std::vector<BenchRow>& rows, std::ostream& os);

} // namespace midas::bench
