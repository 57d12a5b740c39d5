// Score a small prediction stream against ground truth, including a
// detector failure, and print the report.

#include <iostream>
#include <vector>

#include "lanevp/lanevp.hpp"

int main() {
    const lanevp::ImageGeometry geom{1640, 590};
    std::vector<lanevp::EvalRecord> records;
    records.push_back(lanevp::make_eval_record("frame_0", lanevp::Point2{822.0, 294.0},
                                               {820.0, 295.0}, 0.98, geom));
    records.push_back(lanevp::make_eval_record("frame_1", lanevp::Point2{790.0, 310.0},
                                               {812.0, 291.0}, 0.71, geom));
    records.push_back(
        lanevp::make_eval_record("frame_2", std::nullopt, {805.0, 280.0}, 0.0, geom));

    std::vector<double> thresholds{0.01, 0.02};
    auto report = lanevp::evaluate(records, thresholds);
    lanevp::write_eval_report(std::cout, report);
    return 0;
}
