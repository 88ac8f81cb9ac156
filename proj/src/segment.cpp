#include "midas/segment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace midas::seg {

namespace {

constexpr int kNeighborDx[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
constexpr int kNeighborDy[8] = {-1, -1, -1, 0, 0, 1, 1, 1};

Roi make_roi(int id, std::vector<Point> mask, const GrayFrame& frame) {
    Roi roi;
    roi.id = id;
    roi.mask = std::move(mask);
    roi.min_x = roi.min_y = std::numeric_limits<int>::max();
    roi.max_x = roi.max_y = std::numeric_limits<int>::min();
    double sx = 0.0, sy = 0.0;
    for (const Point& p : roi.mask) {
        roi.min_x = std::min(roi.min_x, p.x);
        roi.min_y = std::min(roi.min_y, p.y);
        roi.max_x = std::max(roi.max_x, p.x);
        roi.max_y = std::max(roi.max_y, p.y);
        sx += p.x;
        sy += p.y;
        roi.peak_intensity = std::max(roi.peak_intensity, frame.at(p.x, p.y));
    }
    roi.centroid_x = sx / roi.mask.size();
    roi.centroid_y = sy / roi.mask.size();
    return roi;
}

void sort_and_number(std::vector<Roi>& rois) {
    std::sort(rois.begin(), rois.end(), [](const Roi& a, const Roi& b) {
        return std::pair(a.min_y, a.min_x) < std::pair(b.min_y, b.min_x);
    });
    for (std::size_t i = 0; i < rois.size(); ++i)
        rois[i].id = static_cast<int>(i);
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    }
};

} // namespace

std::vector<Roi> find_rois(const GrayFrame& frame, std::uint8_t threshold) {
    if (threshold < 1)
        throw DomainError("threshold must lie in [1, 255]");
    const int w = frame.width();
    const int h = frame.height();
    std::vector<bool> visited(static_cast<std::size_t>(w) * h, false);

    std::vector<Roi> rois;
    std::vector<Point> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * w + x;
            if (visited[idx] || frame.at(x, y) < threshold)
                continue;
            std::vector<Point> mask;
            stack.push_back({x, y});
            visited[idx] = true;
            while (!stack.empty()) {
                const Point p = stack.back();
                stack.pop_back();
                mask.push_back(p);
                for (int n = 0; n < 8; ++n) {
                    const int nx = p.x + kNeighborDx[n];
                    const int ny = p.y + kNeighborDy[n];
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h)
                        continue;
                    const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
                    if (!visited[nidx] && frame.at(nx, ny) >= threshold) {
                        visited[nidx] = true;
                        stack.push_back({nx, ny});
                    }
                }
            }
            rois.push_back(make_roi(0, std::move(mask), frame));
        }
    }
    sort_and_number(rois);
    return rois;
}

SplitResult split_agglomerated(const GrayFrame& frame, const Roi& roi, const SegmentConfig& cfg) {
    if (roi.mask.empty())
        throw DomainError("ROI mask is empty");

    const int w = frame.width();
    const std::size_t n = roi.mask.size();
    std::map<std::size_t, int> local; // frame pixel index -> mask slot
    for (std::size_t i = 0; i < n; ++i)
        local.emplace(static_cast<std::size_t>(roi.mask[i].y) * w + roi.mask[i].x,
                      static_cast<int>(i));

    // Superlevel-set flooding: visit pixels from hottest down, track the peak
    // of each component and the level where younger peaks get swallowed.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const Point& pa = roi.mask[a];
        const Point& pb = roi.mask[b];
        const std::uint8_t va = frame.at(pa.x, pa.y);
        const std::uint8_t vb = frame.at(pb.x, pb.y);
        if (va != vb)
            return va > vb;
        return std::pair(pa.y, pa.x) < std::pair(pb.y, pb.x);
    });

    UnionFind uf(n);
    std::vector<bool> active(n, false);
    struct Comp {
        int peak_value = 0;
        double peak_sx = 0.0, peak_sy = 0.0; // centroid accumulator of the peak plateau
        int peak_cells = 0;
    };
    std::vector<Comp> comps(n);

    struct Maximum {
        double x, y;
        double prominence;
        int peak_value;
    };
    std::vector<Maximum> maxima;

    std::size_t pos = 0;
    while (pos < n) {
        const std::uint8_t level = frame.at(roi.mask[order[pos]].x, roi.mask[order[pos]].y);
        std::size_t level_end = pos;
        while (level_end < n &&
               frame.at(roi.mask[order[level_end]].x, roi.mask[order[level_end]].y) == level)
            ++level_end;

        for (std::size_t k = pos; k < level_end; ++k) {
            const int i = order[k];
            active[i] = true;
            comps[i] = {level, static_cast<double>(roi.mask[i].x),
                        static_cast<double>(roi.mask[i].y), 1};
        }
        for (std::size_t k = pos; k < level_end; ++k) {
            const int i = order[k];
            const Point& p = roi.mask[i];
            for (int d = 0; d < 8; ++d) {
                const int nx = p.x + kNeighborDx[d];
                const int ny = p.y + kNeighborDy[d];
                auto it = local.find(static_cast<std::size_t>(ny) * w + nx);
                if (nx < 0 || ny < 0 || it == local.end() || !active[it->second])
                    continue;
                int ra = uf.find(i);
                int rb = uf.find(it->second);
                if (ra == rb)
                    continue;
                Comp& ca = comps[ra];
                Comp& cb = comps[rb];
                if (ca.peak_value == cb.peak_value && ca.peak_value == level) {
                    // same newborn plateau: merge the peak accumulators
                    ca.peak_sx += cb.peak_sx;
                    ca.peak_sy += cb.peak_sy;
                    ca.peak_cells += cb.peak_cells;
                    uf.parent[rb] = ra;
                    continue;
                }
                // the component with the lower peak dies here
                int survivor = ra, victim = rb;
                if (ca.peak_value < cb.peak_value ||
                    (ca.peak_value == cb.peak_value &&
                     std::pair(ca.peak_sy / ca.peak_cells, ca.peak_sx / ca.peak_cells) >
                         std::pair(cb.peak_sy / cb.peak_cells, cb.peak_sx / cb.peak_cells))) {
                    std::swap(survivor, victim);
                }
                const Comp& cv = comps[victim];
                const double prominence = cv.peak_value - static_cast<double>(level);
                if (prominence >= cfg.prominence) {
                    maxima.push_back({cv.peak_sx / cv.peak_cells, cv.peak_sy / cv.peak_cells,
                                      prominence, cv.peak_value});
                }
                uf.parent[victim] = survivor;
            }
        }
        pos = level_end;
    }

    // The last surviving component is always a maximum.
    const int final_root = uf.find(0);
    const Comp& cf = comps[final_root];
    maxima.push_back({cf.peak_sx / cf.peak_cells, cf.peak_sy / cf.peak_cells,
                      std::numeric_limits<double>::infinity(), cf.peak_value});

    SplitResult result;
    if (cfg.expected_k) {
        if (*cfg.expected_k > static_cast<int>(maxima.size()))
            result.under_segmented = true;
        else if (*cfg.expected_k < static_cast<int>(maxima.size())) {
            std::stable_sort(maxima.begin(), maxima.end(),
                             [](const Maximum& a, const Maximum& b) {
                                 return a.prominence > b.prominence;
                             });
            maxima.resize(static_cast<std::size_t>(*cfg.expected_k));
        }
    }

    if (maxima.size() <= 1) {
        result.rois.push_back(roi);
        result.rois[0].id = 0;
        return result;
    }

    std::sort(maxima.begin(), maxima.end(), [](const Maximum& a, const Maximum& b) {
        return std::pair(a.y, a.x) < std::pair(b.y, b.x);
    });

    std::vector<std::vector<Point>> parts(maxima.size());
    for (const Point& p : roi.mask) {
        double best_d = std::numeric_limits<double>::infinity();
        std::size_t best_m = 0;
        for (std::size_t m = 0; m < maxima.size(); ++m) {
            const double dx = p.x - maxima[m].x;
            const double dy = p.y - maxima[m].y;
            const double d = dx * dx + dy * dy;
            if (d < best_d) {
                best_d = d;
                best_m = m;
            }
        }
        parts[best_m].push_back(p);
    }
    for (auto& part : parts)
        if (!part.empty())
            result.rois.push_back(make_roi(0, std::move(part), frame));
    sort_and_number(result.rois);
    return result;
}

Arrangement classify_arrangement(const std::vector<Roi>& rois) {
    std::map<std::pair<int, int>, int> owner;
    for (const Roi& r : rois)
        for (const Point& p : r.mask)
            owner[{p.x, p.y}] = r.id;
    for (const Roi& r : rois) {
        for (const Point& p : r.mask) {
            for (int d = 0; d < 8; ++d) {
                auto it = owner.find({p.x + kNeighborDx[d], p.y + kNeighborDy[d]});
                if (it != owner.end() && it->second != r.id)
                    return Arrangement::agglomerated;
            }
        }
    }
    return Arrangement::dispersed;
}

MultiResult extract_multi(const std::vector<GrayFrame>& frames, const fp::FingerprintConfig& cfg,
                          const SegmentConfig& seg_cfg, std::uint32_t fps_millihz) {
    cfg.validate();
    if (frames.empty())
        throw DomainError("no frames");
    if (fps_millihz == 0)
        throw DomainError("fps_millihz must be > 0");

    const GrayFrame& first = frames[0];
    std::vector<Roi> base = find_rois(first, cfg.intensity_threshold);
    if (base.empty())
        throw DomainError("no fingerprint: frame 0 has no ROI");

    MultiResult result;
    std::vector<Roi> rois;
    for (const Roi& r : base) {
        // expected_k is meaningful only for a single agglomerated component
        SegmentConfig sc = seg_cfg;
        if (base.size() > 1)
            sc.expected_k.reset();
        SplitResult split = split_agglomerated(first, r, sc);
        result.under_segmented = result.under_segmented || split.under_segmented;
        for (Roi& s : split.rois)
            rois.push_back(std::move(s));
    }
    sort_and_number(rois);
    result.arrangement = classify_arrangement(rois);

    const int w = first.width();
    const int h = first.height();
    for (const Roi& r : rois) {
        // frozen frame-0 mask, dilated by one pixel
        std::vector<bool> in_mask(static_cast<std::size_t>(w) * h, false);
        for (const Point& p : r.mask) {
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = p.x + dx;
                    const int ny = p.y + dy;
                    if (nx >= 0 && nx < w && ny >= 0 && ny < h)
                        in_mask[static_cast<std::size_t>(ny) * w + nx] = true;
                }
            }
        }
        std::vector<std::size_t> mask_indices;
        for (std::size_t i = 0; i < in_mask.size(); ++i)
            if (in_mask[i])
                mask_indices.push_back(i);

        auto area = [&](const GrayFrame& f) {
            std::size_t a = 0;
            for (std::size_t i : mask_indices)
                if (f.pixels()[i] >= cfg.intensity_threshold)
                    ++a;
            return a;
        };

        const std::size_t a_i = area(first);
        if (a_i == 0)
            throw DomainError("no fingerprint: ROI has zero initial hot area");
        std::vector<double> values(cfg.vector_len, 0.0);
        const std::size_t ncap = std::min(frames.size(), cfg.vector_len);
        bool gone = false;
        for (std::size_t t = 0; t < ncap && !gone; ++t) {
            const std::size_t a_t = std::min(area(frames[t]), a_i);
            values[t] = static_cast<double>(a_t) / static_cast<double>(a_i);
            if (values[t] == 0.0)
                gone = true;
        }
        result.objects.push_back({r, DissipationVector(std::move(values), fps_millihz)});
    }
    return result;
}

} // namespace midas::seg
