// Regenerates the bundled datasets under data/.
#include "pcpd/ingest.hpp"
#include "pcpd/rng.hpp"
#include "pcpd/simgen.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;

int main(int argc, char** argv) {
    const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("data");

    // 40 blocks of M=4 three-dimensional vectors, mean shift of 3 from block 21.
    pcpd::VectorSimConfig toy;
    toy.dimension = 3;
    toy.period = 4;
    toy.blocks = 40;
    toy.changes = {{20 * 4 + 1, 3.0}};
    pcpd::export_dataset(pcpd::generate_periodic_vector_series(toy, 20240401), root / "toy_detect",
                         pcpd::ExportFormat::adjacency_csv, toy.period);

    pcpd::VectorSimConfig null_cfg = toy;
    null_cfg.blocks = 60;
    null_cfg.changes.clear();
    pcpd::export_dataset(pcpd::generate_periodic_vector_series(null_cfg, 20240402), root / "null_segment",
                         pcpd::ExportFormat::adjacency_csv, null_cfg.period);

    // Three days of trips among six stations; station 6 is rarely used.
    std::ofstream trips(root / "trips_sample.csv");
    trips << "tripduration,starttime,stoptime,start station id,end station id\n";
    pcpd::Rng rng(7);
    const char* ids[] = {"72", "79", "82", "83", "116", "3002"};
    for (int day = 1; day <= 3; ++day) {
        for (int hour = 0; hour < 24; ++hour) {
            const auto count = pcpd::uniform_below(rng, 6);
            for (std::uint64_t k = 0; k < count; ++k) {
                const auto a = pcpd::uniform_below(rng, hour % 7 == 0 ? 6 : 5);
                const auto b = pcpd::uniform_below(rng, 5);
                const auto minute = pcpd::uniform_below(rng, 60);
                char stamp[64];
                std::snprintf(stamp, sizeof stamp, "2019-10-%02d %02d:%02d:00.0000", day, hour,
                              static_cast<int>(minute));
                trips << 600 << ",\"" << stamp << "\",\"" << stamp << "\"," << ids[a] << ',' << ids[b] << '\n';
            }
        }
    }
    trips << "600,not a time,,72,79\n";
    std::cout << "fixtures written under " << root.string() << '\n';
    return 0;
}
