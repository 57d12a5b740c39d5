// Render a target probability map for a hand-placed label and write it in
// both the binary container and a viewable graymap.
//
// usage: render_target <out_prefix>

#include <cstdio>

#include "lanevp/lanevp.hpp"

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <out_prefix>\n", argv[0]);
        return 1;
    }
    std::string prefix = argv[1];

    lanevp::VPLabel label;
    label.vp = {410.0, 123.5};
    label.sigma_x = 4.0;
    label.sigma_y = 9.0;
    label.n_int = 6;
    label.valid = true;

    lanevp::GaussianSpec spec;
    spec.sigma_mode = lanevp::SigmaMode::kDynamic;  // rms of the label spread, clipped

    auto h = lanevp::render_target(label, {820, 295}, spec);
    lanevp::write_heatmap(h, prefix + ".vphm");
    lanevp::write_heatmap_pgm(h, prefix + ".pgm");

    auto peak = lanevp::extract_peak(h);
    std::printf("sigma=%.3f peak=(%d, %d) confidence=%.6f\n", spec.resolve_sigma(label), peak.x,
                peak.y, peak.confidence);
    std::printf("wrote %s.vphm and %s.pgm\n", prefix.c_str(), prefix.c_str());
    return 0;
}
