#include "psa/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "json_util.hpp"

namespace psa::phantom {
namespace {

constexpr std::uint64_t kAssignStream = 0xFFFFFFFF00000001ull;
constexpr std::uint64_t kSplitStream = 0xFFFFFFFF00000002ull;

BinaryMask fill_ellipse(int h, int w, double cr, double cc, double ar, double ac) {
    Grid g(h, w);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const double dr = (r - cr) / ar;
            const double dc = (c - cc) / ac;
            if (dr * dr + dc * dc <= 1.0) g.at(r, c) = 1.0f;
        }
    }
    return BinaryMask(std::move(g));
}

BinaryMask shift_superior_margin(const BinaryMask& m, int shift) {
    if (shift == 0) return m;
    const int h = m.grid().height();
    const int w = m.grid().width();
    Grid out = m.grid();
    for (int c = 0; c < w; ++c) {
        int top = -1;
        for (int r = 0; r < h; ++r) {
            if (m.at(r, c)) {
                top = r;
                break;
            }
        }
        if (top < 0) continue;
        if (shift > 0) {
            for (int r = std::max(0, top - shift); r < top; ++r) out.at(r, c) = 1.0f;
        } else {
            for (int r = top; r < std::min(h, top - shift); ++r) out.at(r, c) = 0.0f;
        }
    }
    return BinaryMask(std::move(out));
}

BinaryMask rescale_width(const BinaryMask& m, double factor) {
    if (factor == 1.0) return m;
    const int h = m.grid().height();
    const int w = m.grid().width();
    double col_sum = 0.0;
    std::size_t n = 0;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (m.at(r, c)) {
                col_sum += c;
                ++n;
            }
    if (n == 0) return m;
    const double cx = col_sum / double(n);
    Grid out(h, w);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const long src = std::lround(cx + (c - cx) / factor);
            if (src >= 0 && src < w && m.at(r, int(src))) out.at(r, c) = 1.0f;
        }
    }
    return BinaryMask(std::move(out));
}

BinaryMask carve_bladder_overlap(const BinaryMask& m, const BinaryMask& bladder, double frac) {
    if (frac == 0.0) return m;
    const int h = m.grid().height();
    const int w = m.grid().width();
    std::vector<std::pair<int, int>> overlap;  // row-major: superior pixels first
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (m.at(r, c) && bladder.at(r, c)) overlap.emplace_back(r, c);
    auto k = std::size_t(std::llround(frac * double(overlap.size())));
    k = std::min(k, overlap.size());
    Grid out = m.grid();
    for (std::size_t i = 0; i < k; ++i) out.at(overlap[i].first, overlap[i].second) = 0.0f;
    return BinaryMask(std::move(out));
}

std::vector<std::pair<int, int>> disk_offsets(int radius) {
    std::vector<std::pair<int, int>> offs;
    for (int dr = -radius; dr <= radius; ++dr)
        for (int dc = -radius; dc <= radius; ++dc)
            if (dr * dr + dc * dc <= radius * radius) offs.emplace_back(dr, dc);
    return offs;
}

}  // namespace

bool StyleSpec::same_transform(const StyleSpec& o) const {
    return margin_shift == o.margin_shift && organ_carve == o.organ_carve &&
           smoothing_radius == o.smoothing_radius && lateral_scale == o.lateral_scale;
}

bool StyleSpec::is_identity() const {
    return margin_shift == 0 && organ_carve == 0.0 && smoothing_radius == 0 &&
           lateral_scale == 1.0;
}

BinaryMask dilate_disk(const BinaryMask& m, int radius) {
    if (radius <= 0) return m;
    const auto offs = disk_offsets(radius);
    const int h = m.grid().height();
    const int w = m.grid().width();
    Grid out(h, w);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            for (const auto& [dr, dc] : offs) {
                const int rr = r + dr;
                const int cc = c + dc;
                if (m.grid().in_bounds(rr, cc) && m.at(rr, cc)) {
                    out.at(r, c) = 1.0f;
                    break;
                }
            }
        }
    }
    return BinaryMask(std::move(out));
}

BinaryMask erode_disk(const BinaryMask& m, int radius) {
    if (radius <= 0) return m;
    const auto offs = disk_offsets(radius);
    const int h = m.grid().height();
    const int w = m.grid().width();
    Grid out(h, w);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            bool keep = true;
            for (const auto& [dr, dc] : offs) {
                const int rr = r + dr;
                const int cc = c + dc;
                if (m.grid().in_bounds(rr, cc) && !m.at(rr, cc)) {
                    keep = false;
                    break;
                }
            }
            if (keep) out.at(r, c) = 1.0f;
        }
    }
    return BinaryMask(std::move(out));
}

BinaryMask closing_disk(const BinaryMask& m, int radius) {
    if (radius <= 0) return m;
    return erode_disk(dilate_disk(m, radius), radius);
}

BinaryMask apply_style(const BinaryMask& base_ctv, const BinaryMask& bladder,
                       const BinaryMask& rectum, const StyleSpec& spec) {
    if (!base_ctv.grid().same_shape(bladder.grid()) ||
        !base_ctv.grid().same_shape(rectum.grid()))
        throw std::invalid_argument("apply_style: mask shape mismatch");

    BinaryMask out = shift_superior_margin(base_ctv, spec.margin_shift);
    out = rescale_width(out, spec.lateral_scale);
    out = closing_disk(out, spec.smoothing_radius);
    out = carve_bladder_overlap(out, bladder, spec.organ_carve);
    if (out.count() == 0) throw std::runtime_error("apply_style: style produced an empty mask");
    return out;
}

Anatomy generate_anatomy(const PhantomConfig& cfg, int index, const SeededRng& rng) {
    if (index < 0 || index >= cfg.num_samples)
        throw std::invalid_argument("generate_anatomy: index out of range");
    SeededRng local = rng.fork(std::uint64_t(index));
    const int h = cfg.height;
    const int w = cfg.width;
    const AnatomyRanges& rg = cfg.ranges;

    const double b_cr = rg.bladder_row.sample(local) * h;
    const double b_cc = rg.bladder_col.sample(local) * w;
    const double b_ar = rg.bladder_row_axis.sample(local) * h;
    const double b_ac = rg.bladder_col_axis.sample(local) * w;
    const double r_cr = rg.rectum_row.sample(local) * h;
    const double r_cc = rg.rectum_col.sample(local) * w;
    const double r_ar = rg.rectum_row_axis.sample(local) * h;
    const double r_ac = rg.rectum_col_axis.sample(local) * w;
    const double t_cr = rg.ctv_row.sample(local) * h;
    const double t_cc = rg.ctv_col.sample(local) * w;
    const double t_hh = rg.ctv_half_height.sample(local) * h;
    const double t_hw = rg.ctv_half_width.sample(local) * w;
    const double amp_top = rg.wobble_amplitude.sample(local);
    const double freq_top = rg.wobble_frequency.sample(local);
    const double phase_top = local.uniform() * 2.0 * std::numbers::pi;
    const double amp_bot = rg.wobble_amplitude.sample(local);
    const double freq_bot = rg.wobble_frequency.sample(local);
    const double phase_bot = local.uniform() * 2.0 * std::numbers::pi;

    BinaryMask bladder = fill_ellipse(h, w, b_cr, b_cc, b_ar, b_ac);
    BinaryMask rectum = fill_ellipse(h, w, r_cr, r_cc, r_ar, r_ac);

    // Target: vertically convex column spans with a wobbled boundary so
    // smoothing styles have texture to act on.
    Grid ctv(h, w);
    for (int c = 0; c < w; ++c) {
        const double x = (c - t_cc) / t_hw;
        if (std::abs(x) > 1.0) continue;
        const double hh = t_hh * std::sqrt(1.0 - x * x);
        const double top = t_cr - hh + amp_top * std::sin(freq_top * c + phase_top);
        const double bot = t_cr + hh + amp_bot * std::sin(freq_bot * c + phase_bot);
        const int r0 = std::max(0, int(std::lround(top)));
        const int r1 = std::min(h - 1, int(std::lround(bot)));
        for (int r = r0; r <= r1; ++r) ctv.at(r, c) = 1.0f;
    }
    BinaryMask base_ctv{std::move(ctv)};

    if (bladder.count() == 0 || rectum.count() == 0 || base_ctv.count() == 0)
        throw std::runtime_error("generate_anatomy: degenerate region (empty mask)");
    std::size_t organ_overlap = 0, ctv_bladder = 0;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            if (bladder.at(r, c) && rectum.at(r, c)) ++organ_overlap;
            if (base_ctv.at(r, c) && bladder.at(r, c)) ++ctv_bladder;
        }
    if (organ_overlap != 0)
        throw std::runtime_error("generate_anatomy: bladder and rectum overlap");
    if (ctv_bladder == 0)
        throw std::runtime_error("generate_anatomy: target does not reach the bladder");

    Grid image(h, w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double v = cfg.background_intensity;
            if (bladder.at(r, c)) v = cfg.bladder_intensity;
            else if (rectum.at(r, c)) v = cfg.rectum_intensity;
            image.at(r, c) = float(v);
        }
    if (cfg.noise_sigma > 0.0) {
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c)
                image.at(r, c) += float(local.normal() * cfg.noise_sigma);
    }

    return Anatomy{std::move(image), std::move(bladder), std::move(rectum), std::move(base_ctv)};
}

void PhantomConfig::validate() const {
    if (height < 16 || width < 16) throw std::invalid_argument("phantom config: grid too small");
    if (num_styles < 2) throw std::invalid_argument("phantom config: need at least two styles");
    if (num_samples < 1) throw std::invalid_argument("phantom config: need at least one sample");
    if (int(styles.size()) != num_styles)
        throw std::invalid_argument("phantom config: styles list size must equal num_styles");
    for (int k = 0; k < num_styles; ++k)
        if (styles[k].style_id != k + 1)
            throw std::invalid_argument("phantom config: style ids must be 1..N in order");
    for (std::size_t i = 0; i < styles.size(); ++i)
        for (std::size_t j = i + 1; j < styles.size(); ++j)
            if (styles[i].same_transform(styles[j]))
                throw std::invalid_argument("phantom config: duplicate style transforms");
    if (int(style_probs.size()) != num_styles)
        throw std::invalid_argument("phantom config: style_probs size must equal num_styles");
    double psum = 0.0;
    for (double p : style_probs) {
        if (!(p > 0.0)) throw std::invalid_argument("phantom config: style_probs must be positive");
        psum += p;
    }
    if (std::abs(psum - 1.0) > 1e-9)
        throw std::invalid_argument("phantom config: style_probs must sum to 1");
    if (split.train < 0 || split.val < 0 || split.test < 0 ||
        std::abs(split.train + split.val + split.test - 1.0) > 1e-9)
        throw std::invalid_argument("phantom config: split fractions must be nonnegative and sum to 1");
    if (noise_sigma < 0) throw std::invalid_argument("phantom config: negative noise level");
    const Range* all[] = {&ranges.bladder_row,      &ranges.bladder_col,
                          &ranges.bladder_row_axis, &ranges.bladder_col_axis,
                          &ranges.rectum_row,       &ranges.rectum_col,
                          &ranges.rectum_row_axis,  &ranges.rectum_col_axis,
                          &ranges.ctv_row,          &ranges.ctv_col,
                          &ranges.ctv_half_height,  &ranges.ctv_half_width,
                          &ranges.wobble_amplitude, &ranges.wobble_frequency};
    for (const Range* r : all)
        if (!(r->lo <= r->hi)) throw std::invalid_argument("phantom config: invalid range");
}

PhantomConfig PhantomConfig::defaults() {
    PhantomConfig cfg;
    cfg.styles = {
        StyleSpec{1, 4, 0.0, 0, 1.0},   // generous superior margin
        StyleSpec{2, 0, 0.9, 0, 1.0},   // trims nearly all bladder overlap
        StyleSpec{3, -2, 0.0, 2, 1.0},  // tight margin, smoothed boundary
        StyleSpec{4, 0, 0.0, 0, 1.3},   // laterally generous
    };
    cfg.style_probs = {0.25, 0.25, 0.25, 0.25};
    return cfg;
}

PhantomConfig PhantomConfig::institution_b_defaults() {
    PhantomConfig cfg;
    cfg.num_styles = 2;
    cfg.num_samples = 120;
    cfg.seed = 2;
    cfg.styles = {
        StyleSpec{1, -3, 1.0, 0, 0.85},  // dominant style: much smaller targets
        StyleSpec{2, -1, 0.9, 0, 0.9},
    };
    cfg.style_probs = {0.8, 0.2};
    return cfg;
}

namespace {

using nlohmann::json;

std::vector<std::pair<const char*, Range AnatomyRanges::*>> range_fields() {
    return {{"bladder_row", &AnatomyRanges::bladder_row},
            {"bladder_col", &AnatomyRanges::bladder_col},
            {"bladder_row_axis", &AnatomyRanges::bladder_row_axis},
            {"bladder_col_axis", &AnatomyRanges::bladder_col_axis},
            {"rectum_row", &AnatomyRanges::rectum_row},
            {"rectum_col", &AnatomyRanges::rectum_col},
            {"rectum_row_axis", &AnatomyRanges::rectum_row_axis},
            {"rectum_col_axis", &AnatomyRanges::rectum_col_axis},
            {"ctv_row", &AnatomyRanges::ctv_row},
            {"ctv_col", &AnatomyRanges::ctv_col},
            {"ctv_half_height", &AnatomyRanges::ctv_half_height},
            {"ctv_half_width", &AnatomyRanges::ctv_half_width},
            {"wobble_amplitude", &AnatomyRanges::wobble_amplitude},
            {"wobble_frequency", &AnatomyRanges::wobble_frequency}};
}

}  // namespace

PhantomConfig phantom_config_from_json(const json& j) {
    PhantomConfig cfg = PhantomConfig::defaults();
    try {
        if (j.contains("styles")) {
            cfg.styles.clear();
            for (const auto& s : j.at("styles")) {
                StyleSpec spec;
                spec.style_id = s.at("style_id").get<int>();
                spec.margin_shift = s.value("margin_shift", 0);
                spec.organ_carve = s.value("organ_carve", 0.0);
                spec.smoothing_radius = s.value("smoothing_radius", 0);
                spec.lateral_scale = s.value("lateral_scale", 1.0);
                cfg.styles.push_back(spec);
            }
            cfg.num_styles = int(cfg.styles.size());
            cfg.style_probs.assign(cfg.styles.size(), 1.0 / double(cfg.styles.size()));
        }
        cfg.height = j.value("height", cfg.height);
        cfg.width = j.value("width", cfg.width);
        cfg.num_styles = j.value("num_styles", cfg.num_styles);
        cfg.num_samples = j.value("num_samples", cfg.num_samples);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.noise_sigma = j.value("noise_sigma", cfg.noise_sigma);
        if (j.contains("intensity")) {
            const auto& it = j.at("intensity");
            cfg.background_intensity = it.value("background", cfg.background_intensity);
            cfg.bladder_intensity = it.value("bladder", cfg.bladder_intensity);
            cfg.rectum_intensity = it.value("rectum", cfg.rectum_intensity);
        }
        if (j.contains("style_probs"))
            cfg.style_probs = j.at("style_probs").get<std::vector<double>>();
        if (j.contains("split_fractions")) {
            const auto& s = j.at("split_fractions");
            cfg.split.train = s.value("train", cfg.split.train);
            cfg.split.val = s.value("val", cfg.split.val);
            cfg.split.test = s.value("test", cfg.split.test);
        }
        if (j.contains("ranges")) {
            const auto& r = j.at("ranges");
            for (const auto& [name, member] : range_fields()) {
                if (!r.contains(name)) continue;
                const auto arr = r.at(name).get<std::vector<double>>();
                if (arr.size() != 2)
                    throw std::runtime_error("phantom config: range needs [lo, hi]");
                cfg.ranges.*member = Range{arr[0], arr[1]};
            }
        }
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("phantom config: schema violation: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

json phantom_config_json(const PhantomConfig& cfg) {
    json j;
    j["height"] = cfg.height;
    j["width"] = cfg.width;
    j["num_styles"] = cfg.num_styles;
    j["num_samples"] = cfg.num_samples;
    j["seed"] = cfg.seed;
    j["noise_sigma"] = cfg.noise_sigma;
    j["intensity"] = {{"background", cfg.background_intensity},
                      {"bladder", cfg.bladder_intensity},
                      {"rectum", cfg.rectum_intensity}};
    j["style_probs"] = cfg.style_probs;
    j["split_fractions"] = {
        {"train", cfg.split.train}, {"val", cfg.split.val}, {"test", cfg.split.test}};
    j["styles"] = json::array();
    for (const auto& s : cfg.styles)
        j["styles"].push_back({{"style_id", s.style_id},
                               {"margin_shift", s.margin_shift},
                               {"organ_carve", s.organ_carve},
                               {"smoothing_radius", s.smoothing_radius},
                               {"lateral_scale", s.lateral_scale}});
    json ranges;
    for (const auto& [name, member] : range_fields()) {
        const Range& r = cfg.ranges.*member;
        ranges[name] = {r.lo, r.hi};
    }
    j["ranges"] = std::move(ranges);
    return j;
}

PhantomConfig load_phantom_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("phantom config: cannot open " + file.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("phantom config: parse error: ") + e.what());
    }
    return phantom_config_from_json(j);
}

void save_phantom_config(const PhantomConfig& cfg, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("phantom config: cannot write " + file.string());
    out << phantom_config_json(cfg).dump(2) << '\n';
}

Dataset build_dataset(const PhantomConfig& cfg) {
    cfg.validate();
    SeededRng root(cfg.seed);
    SeededRng assign_rng = root.fork(kAssignStream);
    SeededRng split_rng = root.fork(kSplitStream);

    Dataset d;
    d.num_styles = cfg.num_styles;
    d.samples.reserve(cfg.num_samples);
    for (int i = 0; i < cfg.num_samples; ++i) {
        Anatomy a = generate_anatomy(cfg, i, root);
        StyledSample s{std::move(a.image), std::move(a.bladder), std::move(a.rectum), {}, 0};
        s.ctv_by_style.reserve(cfg.num_styles);
        for (const auto& spec : cfg.styles)
            s.ctv_by_style.push_back(apply_style(a.base_ctv, s.bladder, s.rectum, spec));
        s.assigned_style = assign_rng.categorical(cfg.style_probs) + 1;
        d.samples.push_back(std::move(s));
    }

    std::vector<std::size_t> order(d.samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    split_rng.shuffle(order);
    const auto n = d.samples.size();
    std::size_t n_train = std::size_t(std::llround(cfg.split.train * double(n)));
    std::size_t n_val = std::size_t(std::llround(cfg.split.val * double(n)));
    n_train = std::min(n_train, n);
    n_val = std::min(n_val, n - n_train);
    d.split_tags.assign(n, Split::Test);
    for (std::size_t i = 0; i < n_train; ++i) d.split_tags[order[i]] = Split::Train;
    for (std::size_t i = n_train; i < n_train + n_val; ++i) d.split_tags[order[i]] = Split::Val;

    d.validate();
    return d;
}

}  // namespace psa::phantom
