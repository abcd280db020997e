#include "psa/maps.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "psa/blob.hpp"

namespace psa::maps {
namespace {

CallCounters g_counters;

constexpr double kFar = 1e20;

// Lower-envelope-of-parabolas pass: d[q] = min_p (q-p)^2 + f[p].
void dt1d(const std::vector<double>& f, std::vector<double>& d, int n) {
    static thread_local std::vector<int> v;
    static thread_local std::vector<double> z;
    v.assign(n, 0);
    z.assign(n + 1, 0.0);

    int k = 0;
    z[0] = -kFar;
    z[1] = kFar;
    for (int q = 1; q < n; ++q) {
        double s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
                   (2.0 * q - 2.0 * v[k]);
        while (s <= z[k]) {
            --k;
            s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
                (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kFar;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        d[q] = double(q - v[k]) * (q - v[k]) + f[v[k]];
    }
}

// Squared Euclidean distance to the nearest pixel where `fg(r, c)` holds.
template <typename Pred>
std::vector<double> squared_distance_field(int h, int w, Pred fg) {
    std::vector<double> sq(std::size_t(h) * w);
    std::vector<double> f(std::max(h, w)), d(std::max(h, w));

    for (int c = 0; c < w; ++c) {
        for (int r = 0; r < h; ++r) f[r] = fg(r, c) ? 0.0 : kFar;
        dt1d(f, d, h);
        for (int r = 0; r < h; ++r) sq[std::size_t(r) * w + c] = d[r];
    }
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) f[c] = sq[std::size_t(r) * w + c];
        dt1d(f, d, w);
        for (int c = 0; c < w; ++c) sq[std::size_t(r) * w + c] = d[c];
    }
    return sq;
}

}  // namespace

CallCounters call_counters() { return g_counters; }

EdgeMap edge_map(const BinaryMask& m) {
    ++g_counters.edge_map;
    const int h = m.grid().height();
    const int w = m.grid().width();
    Grid out(h, w);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const bool center = m.at(r, c);
            bool edge = false;
            for (int dr = -1; dr <= 1 && !edge; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    const int rr = r + dr;
                    const int cc = c + dc;
                    if (!m.grid().in_bounds(rr, cc)) continue;  // border copies center
                    if (m.at(rr, cc) != center) {
                        edge = true;
                        break;
                    }
                }
            }
            out.at(r, c) = edge ? 1.0f : 0.0f;
        }
    }
    return BinaryMask(std::move(out));
}

OverlapMap overlap_map(const BinaryMask& ctv, const BinaryMask& organ) {
    ++g_counters.overlap_map;
    if (!ctv.grid().same_shape(organ.grid()))
        throw std::invalid_argument("overlap_map: shape mismatch");
    const int h = ctv.grid().height();
    const int w = ctv.grid().width();
    Grid out(h, w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            out.at(r, c) = (ctv.at(r, c) && organ.at(r, c)) ? 1.0f : 0.0f;
    return BinaryMask(std::move(out));
}

Grid distance_to_foreground(const BinaryMask& m) {
    const auto sq = squared_distance_to_foreground(m);
    const int h = m.grid().height();
    const int w = m.grid().width();
    Grid out(h, w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            out.at(r, c) = float(std::sqrt(sq[std::size_t(r) * w + c]));
    return out;
}

std::vector<double> squared_distance_to_foreground(const BinaryMask& m) {
    if (m.count() == 0)
        throw std::invalid_argument("distance_to_foreground: empty mask");
    return squared_distance_field(m.grid().height(), m.grid().width(),
                                  [&](int r, int c) { return m.at(r, c); });
}

DistanceMap signed_distance_transform(const BinaryMask& m) {
    ++g_counters.signed_distance_transform;
    const int h = m.grid().height();
    const int w = m.grid().width();
    const std::size_t fg = m.count();
    if (fg == 0 || fg == std::size_t(h) * w)
        throw std::invalid_argument("signed_distance_transform: mask must contain both labels");

    const auto d_to_fg = squared_distance_field(h, w, [&](int r, int c) { return m.at(r, c); });
    const auto d_to_bg = squared_distance_field(h, w, [&](int r, int c) { return !m.at(r, c); });

    Grid out(h, w);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const std::size_t i = std::size_t(r) * w + c;
            // Distance to the nearest opposite-label pixel, negated inside.
            out.at(r, c) = m.at(r, c) ? float(-std::sqrt(d_to_bg[i])) : float(std::sqrt(d_to_fg[i]));
        }
    }
    return out;
}

MapsStore precompute(const Dataset& d) {
    MapsStore store;
    store.per_sample.reserve(d.samples.size());
    for (const auto& s : d.samples) {
        const BinaryMask& ctv = s.assigned_ctv();
        SampleMaps m{edge_map(ctv), overlap_map(ctv, s.bladder), overlap_map(ctv, s.rectum),
                     signed_distance_transform(ctv)};
        store.per_sample.push_back(std::move(m));
    }
    return store;
}

namespace {

char const* const kBlobNames[4] = {"edge", "overlap_bladder", "overlap_rectum", "distance"};

const Grid& nth_grid(const SampleMaps& m, int i) {
    switch (i) {
        case 0: return m.edge.grid();
        case 1: return m.overlap_bladder.grid();
        case 2: return m.overlap_rectum.grid();
        default: return m.distance;
    }
}

std::string maps_blob_file(std::size_t idx, const char* name) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "m%04zu_%s.psag", idx, name);
    return buf;
}

}  // namespace

void save_maps(const MapsStore& store, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    nlohmann::json manifest;
    manifest["format"] = "psa-maps";
    manifest["version"] = 1;
    manifest["count"] = store.per_sample.size();
    auto& samples = manifest["samples"] = nlohmann::json::array();

    for (std::size_t i = 0; i < store.per_sample.size(); ++i) {
        nlohmann::json entry;
        char id[16];
        std::snprintf(id, sizeof id, "m%04zu", i);
        entry["id"] = id;
        for (int b = 0; b < 4; ++b) {
            const std::string file = maps_blob_file(i, kBlobNames[b]);
            const std::uint32_t crc = blob::write_grid(dir / file, nth_grid(store.per_sample[i], b));
            entry["blobs"][kBlobNames[b]] = {{"file", file}, {"crc32", crc}};
        }
        samples.push_back(std::move(entry));
    }

    std::ofstream out(dir / "maps_manifest.json");
    if (!out) throw std::runtime_error("save_maps: cannot write manifest");
    out << manifest.dump(2) << '\n';
}

MapsStore load_maps(const std::filesystem::path& dir, const Dataset& d) {
    std::ifstream in(dir / "maps_manifest.json");
    if (!in) throw std::runtime_error("load_maps: missing maps_manifest.json");
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("maps manifest: parse error: ") + e.what());
    }

    MapsStore store;
    try {
        if (manifest.at("format").get<std::string>() != "psa-maps")
            throw std::runtime_error("maps manifest: wrong format tag");
        if (manifest.at("version").get<int>() != 1)
            throw std::runtime_error("maps manifest: unsupported version");
        const auto& samples = manifest.at("samples");
        if (samples.size() != d.samples.size() ||
            manifest.at("count").get<std::size_t>() != d.samples.size())
            throw std::runtime_error("maps manifest: sample count does not match dataset");

        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto& blobs = samples[i].at("blobs");
            Grid loaded[4] = {Grid(1, 1), Grid(1, 1), Grid(1, 1), Grid(1, 1)};
            for (int b = 0; b < 4; ++b) {
                const auto& ref = blobs.at(kBlobNames[b]);
                loaded[b] = blob::read_grid(dir / ref.at("file").get<std::string>(),
                                            ref.at("crc32").get<std::uint32_t>());
                if (!loaded[b].same_shape(d.samples[i].image))
                    throw std::runtime_error("load_maps: map shape does not match dataset sample");
            }
            store.per_sample.push_back(SampleMaps{BinaryMask(std::move(loaded[0])),
                                                  BinaryMask(std::move(loaded[1])),
                                                  BinaryMask(std::move(loaded[2])),
                                                  std::move(loaded[3])});
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("maps manifest: schema violation: ") + e.what());
    }
    return store;
}

}  // namespace psa::maps
