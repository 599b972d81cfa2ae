#include <algorithm>
#include <cmath>

#include "vpd/detect.hpp"
#include "vpd/mat3.hpp"
#include "vpd/parallel.hpp"

namespace vpd {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kGoldenAngle = 2.39996322972865332223;

}  // namespace

const char* to_string(DetectMode m) {
    return m == DetectMode::manhattan ? "manhattan" : "multi";
}

const char* to_string(FocalSource s) {
    switch (s) {
        case FocalSource::manifest: return "manifest";
        case FocalSource::flag: return "flag";
        default: return "default";
    }
}

double ClusterConfig::merge_radius_rad() const {
    if (merge_radius > 0.0) return merge_radius;
    return std::acos(std::clamp(1.0 - eps, -1.0, 1.0));
}

void DetectConfig::validate() const {
    hough.validate();
    edges.validate();
    cluster.validate();
    if (filter_window < 1 || filter_window % 2 == 0)
        throw InvalidArgument("detect: filter_window must be odd and >= 1");
    if (lattice_n < 1) throw InvalidArgument("detect: lattice_n must be >= 1");
    if (m_samples < 2) throw InvalidArgument("detect: m_samples must be >= 2");
    if (smooth_rounds < 0) throw InvalidArgument("detect: smooth_rounds must be >= 0");
    if (!(score_quantile >= 0.0 && score_quantile < 1.0))
        throw InvalidArgument("detect: score_quantile must be in [0, 1)");
    if (shortlist < 3) throw InvalidArgument("detect: shortlist must be >= 3");
    for (const ScaleSpec& s : scales)
        if (s.n_points < 1 || !(s.delta_rad > 0.0))
            throw InvalidArgument("detect: scales need positive delta and n");
    if (fast && (scales.empty() || scales.front().delta_rad < kHemisphereDelta))
        throw InvalidArgument("detect: fast mode needs a hemisphere-covering first scale");
}

// ---------------------------------------------------------------------------
// Field smoothing

SphereField smooth_field(const SphereField& field, int rounds, SmoothStats* stats) {
    if (rounds < 0) throw InvalidArgument("smooth_field: rounds must be >= 0");
    const SphereLattice& lat = *field.lattice;
    SphereField cur = field;
    if (stats) stats->max_relative_drift = 0.0;
    if (rounds == 0 || lat.k == 0) return cur;

    const double inv = 1.0 / (1.0 + lat.k);
    SphereField next(lat);
    for (int r = 0; r < rounds; ++r) {
        double mass_before = cur.total();
        for (std::size_t i = 0; i < lat.size(); ++i) {
            double acc = cur.values[i];
            const std::uint32_t* nb = lat.neighbors(i);
            for (int j = 0; j < lat.k; ++j) acc += cur.values[nb[j]];
            next.values[i] = acc * inv;
        }
        double mass_after = next.total();
        if (mass_before > 0.0 && mass_after > 0.0) {
            double drift = std::abs(mass_after - mass_before) / mass_before;
            if (stats) stats->max_relative_drift = std::max(stats->max_relative_drift, drift);
            double scale = mass_before / mass_after;
            for (double& v : next.values) v *= scale;
        }
        std::swap(cur.values, next.values);
    }
    return cur;
}

SphereField subtract_background(const SphereField& field, std::size_t coarse_n, unsigned jobs) {
    const SphereLattice& lat = *field.lattice;
    SphereField out = field;
    if (coarse_n < 4 || lat.size() < 8 * coarse_n) return out;
    if (jobs == 0) jobs = default_jobs();

    SphereLattice coarse = fibonacci_hemisphere(coarse_n, 0, jobs);

    // Per-cell MEDIAN of the fine field over the coarse Voronoi cells: a
    // narrow peak cannot lift the median of its own cell, while the broad
    // axis bump moves cell medians along with it.
    std::vector<std::uint32_t> snap(lat.size());
    parallel_for(lat.size(), jobs, [&](std::size_t i) {
        snap[i] = static_cast<std::uint32_t>(coarse.nearest(lat.points[i]));
    });
    std::vector<std::vector<float>> cells(coarse.size());
    for (std::size_t i = 0; i < lat.size(); ++i)
        cells[snap[i]].push_back(static_cast<float>(field.values[i]));

    std::vector<double> bg(coarse.size(), 0.0);
    parallel_for(coarse.size(), jobs, [&](std::size_t c) {
        std::vector<float>& v = cells[c];
        if (v.empty()) return;
        std::size_t mid = v.size() / 2;
        std::nth_element(v.begin(), v.begin() + mid, v.end());
        bg[c] = v[mid];
    });

    for (std::size_t i = 0; i < lat.size(); ++i)
        out.values[i] = std::max(0.0, field.values[i] - bg[snap[i]]);
    return out;
}

// ---------------------------------------------------------------------------
// Clustering

std::vector<VanishingPoint> cluster_field(const SphereField& field, const ClusterConfig& cfg,
                                          double score_quantile,
                                          const std::vector<std::uint32_t>* counts,
                                          std::uint32_t min_circles) {
    cfg.validate();
    const SphereLattice& lat = *field.lattice;
    const std::size_t n = lat.size();
    if (n == 0) return {};

    // Participation gate: strictly above the configured score quantile, and
    // crossed by enough distinct circles when counts are available.
    std::vector<double> sorted = field.values;
    std::size_t qi = static_cast<std::size_t>(score_quantile * (n - 1));
    std::nth_element(sorted.begin(), sorted.begin() + qi, sorted.end());
    const double threshold = sorted[qi];

    std::vector<std::uint32_t> participants;
    std::vector<std::uint8_t> in(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (field.values[i] <= threshold) continue;
        if (counts && (*counts)[i] < min_circles) continue;
        participants.push_back(static_cast<std::uint32_t>(i));
        in[i] = 1;
    }
    if (participants.empty()) return {};

    const double eps_angle = std::acos(std::clamp(1.0 - cfg.eps, -1.0, 1.0));

    // DBSCAN with an eps-ball reachability predicate over the participants.
    constexpr std::int32_t kUnvisited = -1, kNoise = -2;
    std::vector<std::int32_t> label(n, kUnvisited);
    std::vector<std::uint32_t> hits, frontier, members;
    std::int32_t n_clusters = 0;
    std::vector<std::vector<std::uint32_t>> clusters;

    auto neighbors_of = [&](std::uint32_t i, std::vector<std::uint32_t>& out) {
        lat.query(lat.points[i], eps_angle, hits);
        out.clear();
        for (std::uint32_t h : hits)
            if (in[h]) out.push_back(h);
        std::sort(out.begin(), out.end());
    };

    std::vector<std::uint32_t> nb;
    for (std::uint32_t seed : participants) {
        if (label[seed] != kUnvisited) continue;
        neighbors_of(seed, nb);
        if (static_cast<int>(nb.size()) < cfg.min_points) {
            label[seed] = kNoise;
            continue;
        }
        std::int32_t cid = n_clusters++;
        clusters.emplace_back();
        label[seed] = cid;
        clusters[cid].push_back(seed);
        frontier.assign(nb.begin(), nb.end());
        for (std::size_t f = 0; f < frontier.size(); ++f) {
            std::uint32_t q = frontier[f];
            if (label[q] == kNoise) {
                label[q] = cid;  // border point adoption
                clusters[cid].push_back(q);
            }
            if (label[q] != kUnvisited) continue;
            label[q] = cid;
            clusters[cid].push_back(q);
            neighbors_of(q, members);
            if (static_cast<int>(members.size()) >= cfg.min_points)
                frontier.insert(frontier.end(), members.begin(), members.end());
        }
    }

    std::vector<VanishingPoint> reps;
    reps.reserve(clusters.size());
    for (const auto& cluster : clusters) {
        std::uint32_t best = cluster.front();
        for (std::uint32_t i : cluster)
            if (field.values[i] > field.values[best] ||
                (field.values[i] == field.values[best] && i < best))
                best = i;
        reps.push_back({lat.points[best], field.values[best]});
    }

    std::sort(reps.begin(), reps.end(), [](const VanishingPoint& a, const VanishingPoint& b) {
        return a.confidence > b.confidence;
    });

    // Enforce the pairwise merge radius, keeping the stronger point.
    const double merge_r = cfg.merge_radius_rad();
    std::vector<VanishingPoint> out;
    for (const VanishingPoint& vp : reps) {
        bool close = false;
        for (const VanishingPoint& kept : out)
            if (angular_distance(vp.direction, kept.direction) <= merge_r) {
                close = true;
                break;
            }
        if (!close) out.push_back(vp);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Manhattan triple

namespace {

double ortho_deviation(const Vec3& a, const Vec3& b) {
    return std::abs(0.5 * kPi - angular_distance(a, b));
}

}  // namespace

TripleResult select_manhattan_triple(const std::vector<VanishingPoint>& candidates,
                                     double ortho_tol_rad, int shortlist) {
    if (candidates.size() < 2)
        throw InsufficientCandidates("select_manhattan_triple: need at least 2 candidates");

    const int s = static_cast<int>(std::min<std::size_t>(shortlist, candidates.size()));

    TripleResult result;
    if (candidates.size() == 2) {
        Vec3 c = candidates[0].direction.cross(candidates[1].direction);
        double norm = c.norm();
        if (norm < 1e-9)
            throw InsufficientCandidates("select_manhattan_triple: two parallel candidates");
        result.vps = {candidates[0], candidates[1], VanishingPoint{canonicalize(c * (1.0 / norm)), 0.0}};
        result.synthesized = true;
        result.relaxed = ortho_deviation(candidates[0].direction, candidates[1].direction) > ortho_tol_rad;
        return result;
    }

    // Exhaustive search over the shortlist.
    double best_conf = -1.0;
    std::array<int, 3> best{-1, -1, -1};
    for (int i = 0; i < s; ++i) {
        for (int j = i + 1; j < s; ++j) {
            if (ortho_deviation(candidates[i].direction, candidates[j].direction) > ortho_tol_rad)
                continue;
            for (int k = j + 1; k < s; ++k) {
                if (ortho_deviation(candidates[i].direction, candidates[k].direction) > ortho_tol_rad ||
                    ortho_deviation(candidates[j].direction, candidates[k].direction) > ortho_tol_rad)
                    continue;
                double conf = candidates[i].confidence + candidates[j].confidence +
                              candidates[k].confidence;
                if (conf > best_conf) {
                    best_conf = conf;
                    best = {i, j, k};
                }
            }
        }
    }
    if (best[0] >= 0) {
        result.vps = {candidates[best[0]], candidates[best[1]], candidates[best[2]]};
        return result;
    }

    // Greedy fallback: top candidate, most orthogonal partner, then the
    // candidate nearest their cross product (or the cross product itself).
    result.relaxed = true;
    const VanishingPoint& a = candidates[0];
    int bi = -1;
    double bdev = 1e30;
    for (int i = 1; i < static_cast<int>(candidates.size()); ++i) {
        if (angular_distance(a.direction, candidates[i].direction) < 1e-6) continue;
        double dev = ortho_deviation(a.direction, candidates[i].direction);
        if (dev < bdev) {
            bdev = dev;
            bi = i;
        }
    }
    if (bi < 0) throw InsufficientCandidates("select_manhattan_triple: candidates are collinear");
    const VanishingPoint& b = candidates[bi];

    Vec3 cross = a.direction.cross(b.direction);
    Vec3 c_dir = canonicalize(cross * (1.0 / cross.norm()));
    int ci = -1;
    double cbest = 1e30;
    for (int i = 1; i < static_cast<int>(candidates.size()); ++i) {
        if (i == bi) continue;
        double d = angular_distance(candidates[i].direction, c_dir);
        if (d < cbest) {
            cbest = d;
            ci = i;
        }
    }
    VanishingPoint c;
    if (ci >= 0 && cbest <= 2.0 * ortho_tol_rad) {
        c = candidates[ci];
    } else {
        c = {c_dir, 0.0};
        result.synthesized = true;
    }
    result.vps = {a, b, c};
    std::sort(result.vps.begin(), result.vps.end(),
              [](const VanishingPoint& x, const VanishingPoint& y) {
                  return x.confidence > y.confidence;
              });
    return result;
}

// ---------------------------------------------------------------------------
// Multi-scale refinement

namespace {

/// Cap patch around `center` with angular radius delta; point 0 is the
/// center itself, the rest follow a Fibonacci spiral out to the rim.
std::vector<Vec3> cap_points(const Vec3& center, double delta, int n) {
    std::vector<Vec3> pts;
    pts.reserve(n);
    pts.push_back(center);
    if (n == 1) return pts;

    // Rotation taking the pole to the center.
    Vec3 zaxis{0, 0, 1};
    Vec3 axis = zaxis.cross(center);
    double sin_a = axis.norm(), cos_a = std::clamp(center.z, -1.0, 1.0);
    bool aligned = sin_a < 1e-12;
    if (!aligned) axis = axis * (1.0 / sin_a);

    const double z_span = 1.0 - std::cos(delta);
    for (int i = 1; i < n; ++i) {
        double z = 1.0 - z_span * (static_cast<double>(i) / (n - 1));
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double phi = kGoldenAngle * i;
        Vec3 p{r * std::cos(phi), r * std::sin(phi), z};
        if (!aligned) {
            // Rodrigues rotation.
            p = p * cos_a + axis.cross(p) * sin_a + axis * (axis.dot(p) * (1.0 - cos_a));
        } else if (cos_a < 0.0) {
            p = -p;
        }
        pts.push_back(canonicalize(p));
    }
    return pts;
}

/// Accumulates votes of the filtered grid onto an arbitrary point set by
/// snapping great-circle samples that land within the cap; each point takes
/// the per-angle-column MEAN contribution (see accumulate_field_column_mean
/// for why). The circle is traced both by the azimuth sweep and by a uniform
/// walk in its own plane basis; bins whose circle stays outside the (padded)
/// cap are skipped outright.
std::vector<double> accumulate_on_patch(const HoughGrid& filtered,
                                        const CameraIntrinsics& grid_camera,
                                        const std::vector<Vec3>& pts, const SphereIndex* index,
                                        const Vec3& center, double delta, std::uint32_t m,
                                        unsigned jobs, std::vector<std::uint32_t>* counts) {
    const HoughParams& params = filtered.params;
    std::vector<double> sin_a(m), cos_a(m), sin_t(m), cos_t(m);
    for (std::uint32_t i = 0; i < m; ++i) {
        double alpha = -0.5 * kPi + 1.5 * kPi * (static_cast<double>(i) / m);
        sin_a[i] = std::sin(alpha);
        cos_a[i] = std::cos(alpha);
        double t = kPi * (static_cast<double>(i) / m);
        sin_t[i] = std::sin(t);
        cos_t[i] = std::cos(t);
    }

    const bool global = delta >= kHemisphereDelta;
    const double pad = 2.0 * std::sqrt(2.0 * kPi * (1.0 - std::cos(delta)) / pts.size());
    const double cap_cos = global ? -1.0 : std::cos(std::min(kPi, delta + pad));
    const double plane_sin = global ? 2.0 : std::sin(std::min(0.5 * kPi, delta + pad));

    constexpr std::size_t kChunks = 32;
    std::vector<std::vector<double>> partial(kChunks);
    std::vector<std::vector<std::uint32_t>> partial_counts(kChunks);

    auto snap = [&](const Vec3& p) {
        if (index) return index->nearest(pts, p);
        int best = 0;
        double best_dot = -1.0;
        for (std::size_t q = 0; q < pts.size(); ++q) {
            double d = std::abs(p.dot(pts[q]));
            if (d > best_dot) {
                best_dot = d;
                best = static_cast<int>(q);
            }
        }
        return best;
    };

    parallel_chunks(static_cast<std::size_t>(params.n_theta), jobs,
                    [&](std::size_t c, std::size_t jb, std::size_t je) {
                        std::vector<double>& acc = partial[c];
                        acc.assign(pts.size(), 0.0);
                        std::vector<std::uint32_t>& acc_cnt = partial_counts[c];
                        if (counts) acc_cnt.assign(pts.size(), 0);
                        std::vector<double> sum(pts.size(), 0.0);
                        std::vector<std::uint32_t> count(pts.size(), 0);
                        std::vector<std::uint32_t> ids, touched;
                        for (std::size_t j = jb; j < je; ++j) {
                            touched.clear();
                            for (int k = 0; k < params.n_rho; ++k) {
                                std::size_t bin = params.bin_index(k, static_cast<int>(j));
                                double vote = filtered.votes[bin];
                                if (vote <= 0.0) continue;
                                GridLine line = bin_to_line(k, static_cast<int>(j), params);
                                Vec3 n = line_normal(line, params, grid_camera);
                                if (!global && std::abs(n.dot(center)) > plane_sin) continue;

                                ids.clear();
                                for (std::uint32_t i = 0; i < m; ++i) {
                                    Vec3 p = great_circle_point(sin_a[i], cos_a[i], n);
                                    if (global || std::abs(p.dot(center)) >= cap_cos)
                                        ids.push_back(static_cast<std::uint32_t>(snap(p)));
                                }
                                Vec3 seed = std::abs(n.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
                                Vec3 u = (seed - n * seed.dot(n)).normalized();
                                Vec3 w = n.cross(u);
                                for (std::uint32_t i = 0; i < m; ++i) {
                                    Vec3 p = canonicalize(u * cos_t[i] + w * sin_t[i]);
                                    if (global || std::abs(p.dot(center)) >= cap_cos)
                                        ids.push_back(static_cast<std::uint32_t>(snap(p)));
                                }
                                std::sort(ids.begin(), ids.end());
                                ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
                                for (std::uint32_t id : ids) {
                                    if (count[id] == 0) touched.push_back(id);
                                    sum[id] += vote;
                                    ++count[id];
                                }
                            }
                            for (std::uint32_t id : touched) {
                                acc[id] += sum[id] / count[id];
                                if (counts) acc_cnt[id] += count[id];
                                sum[id] = 0.0;
                                count[id] = 0;
                            }
                        }
                    },
                    kChunks);

    std::vector<double> out(pts.size(), 0.0);
    if (counts) counts->assign(pts.size(), 0);
    for (std::size_t c = 0; c < kChunks; ++c) {
        const auto& acc = partial[c];
        if (acc.empty()) continue;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += acc[i];
        if (counts)
            for (std::size_t i = 0; i < out.size(); ++i) (*counts)[i] += partial_counts[c][i];
    }
    return out;
}

/// Top-scoring well-separated points of a sampled field, as candidates for
/// the bootstrap triple selection.
std::vector<VanishingPoint> field_peaks(const std::vector<Vec3>& pts,
                                        const std::vector<double>& values,
                                        const std::vector<std::uint32_t>& counts,
                                        std::uint32_t min_circles, double min_sep,
                                        std::size_t max_count) {
    std::vector<std::uint32_t> order(pts.size());
    for (std::uint32_t i = 0; i < pts.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (values[a] != values[b]) return values[a] > values[b];
        return a < b;
    });
    std::vector<VanishingPoint> peaks;
    for (std::uint32_t i : order) {
        if (values[i] <= 0.0 || peaks.size() >= max_count) break;
        if (counts[i] < min_circles) continue;
        bool close = false;
        for (const VanishingPoint& p : peaks)
            if (angular_distance(pts[i], p.direction) < min_sep) {
                close = true;
                break;
            }
        if (!close) peaks.push_back({pts[i], values[i]});
    }
    return peaks;
}

}  // namespace

double measure_cap_covering(double delta_rad, int n_points) {
    Vec3 pole{0, 0, 1};
    std::vector<Vec3> patch = cap_points(pole, delta_rad, n_points);
    // Probe with a much denser spiral over the same cap, offset in phase.
    const int n_probe = 25 * n_points;
    const double z_span = 1.0 - std::cos(delta_rad);
    double worst = 0.0;
    for (int i = 0; i < n_probe; ++i) {
        double z = 1.0 - z_span * ((i + 0.5) / n_probe);
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double phi = kGoldenAngle * (i + 0.618033988749894848);
        Vec3 p{r * std::cos(phi), r * std::sin(phi), z};
        double best = kPi;
        for (const Vec3& q : patch) best = std::min(best, angular_distance(p, q));
        worst = std::max(worst, best);
    }
    return worst;
}

std::array<Vec3, 3> snap_orthonormal(const std::array<Vec3, 3>& dirs) {
    Mat3 m = Mat3::from_columns(dirs[0], dirs[1], dirs[2]);
    Mat3 r = nearest_orthonormal(m);
    return {canonicalize(r.col[0].normalized()), canonicalize(r.col[1].normalized()),
            canonicalize(r.col[2].normalized())};
}

RefineResult refine_multiscale(std::optional<std::array<VanishingPoint, 3>> anchors,
                               const HoughGrid& filtered, const CameraIntrinsics& grid_camera,
                               std::span<const ScaleSpec> scales, const DetectConfig& cfg) {
    if (scales.empty()) throw InvalidArgument("refine_multiscale: scales must be nonempty");
    unsigned jobs = cfg.jobs == 0 ? default_jobs() : cfg.jobs;

    RefineResult result;
    bool have_anchors = anchors.has_value();
    std::array<VanishingPoint, 3> cur{};
    if (have_anchors) cur = *anchors;

    double finest_delta = 0.0;
    int finest_n = 0;

    for (const ScaleSpec& scale : scales) {
        if (scale.delta_rad >= kHemisphereDelta) {
            if (have_anchors) continue;  // subsumed by the denser anchor stage
            // Bootstrap: global sampling + orthogonal triple selection.
            SphereLattice global = fibonacci_hemisphere(static_cast<std::size_t>(scale.n_points), 0, jobs);
            SphereField coarse_field(global);
            std::vector<std::uint32_t> counts;
            coarse_field.values =
                accumulate_on_patch(filtered, grid_camera, global.points, &global.index,
                                    Vec3{0, 0, 1}, kPi, cfg.m_samples, jobs, &counts);
            coarse_field = subtract_background(coarse_field, global.size() / 8, jobs);
            std::vector<VanishingPoint> peaks =
                field_peaks(global.points, coarse_field.values, counts,
                            std::min<std::uint32_t>(cfg.min_circles, 2), 2.0 * global.spacing(), 24);
            TripleResult triple = select_manhattan_triple(
                peaks, std::max(cfg.ortho_tol_rad, 3.0 * global.spacing()), cfg.shortlist);
            cur = triple.vps;
            have_anchors = true;
            continue;
        }

        if (!have_anchors)
            throw InvalidArgument("refine_multiscale: local scale without anchors");

        finest_delta = scale.delta_rad;
        finest_n = scale.n_points;
        for (int a = 0; a < 3; ++a) {
            std::vector<Vec3> patch = cap_points(cur[a].direction, scale.delta_rad, scale.n_points);
            std::vector<std::uint32_t> counts;
            std::vector<double> votes =
               accumulate_on_patch(filtered, grid_camera, patch, nullptr, cur[a].direction,
                                   scale.delta_rad, cfg.m_samples, jobs, &counts);
            // Argmax over multi-circle points when any exist (a lone strong
            // circle sweeping the patch must not drag the anchor away).
            std::size_t best = 0;
            bool any = false, best_multi = false;
            for (std::size_t i = 0; i < votes.size(); ++i) {
                if (votes[i] <= 0.0) continue;
                any = true;
                bool multi = counts[i] >= 2;
                if ((multi && !best_multi) || (multi == best_multi && votes[i] > votes[best])) {
                    best = i;
                    best_multi = multi;
                }
            }
            if (!any) {
                ++result.empty_patches;  // keep the anchor, note the dud
                continue;
            }
            cur[a] = {patch[best], votes[best]};
        }
    }

    if (!have_anchors)
        throw InvalidArgument("refine_multiscale: no anchor-producing scale");

    result.raw_dirs = {cur[0].direction, cur[1].direction, cur[2].direction};
    if (cfg.snap_orthogonal) {
        std::array<Vec3, 3> snapped =
            snap_orthonormal({cur[0].direction, cur[1].direction, cur[2].direction});
        for (int i = 0; i < 3; ++i) cur[i].direction = snapped[i];
    }
    std::sort(cur.begin(), cur.end(), [](const VanishingPoint& a, const VanishingPoint& b) {
        return a.confidence > b.confidence;
    });
    result.vps = cur;
    if (finest_n > 0) result.finest_patch_covering = measure_cap_covering(finest_delta, finest_n);
    return result;
}

}  // namespace vpd
