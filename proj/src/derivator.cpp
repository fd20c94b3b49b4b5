#include "stieltjes/derivator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stieltjes/errors.hpp"
#include "stieltjes/polynomial.hpp"

namespace stieltjes {

namespace {

bool finite(double x) { return std::isfinite(x); }

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

bool is_zero(const SegmentDensity& s) { return std::holds_alternative<ZeroDensity>(s); }

// Number of cells in a sampled segment.
std::size_t cells(const SampledDensity& s) { return s.values.size() - 1; }

}  // namespace

Derivator::Derivator(std::vector<double> breakpoints,
                     std::vector<SegmentDensity> segments,
                     std::map<double, double> jumps,
                     double anchor,
                     DerivatorOptions options)
    : breakpoints_(std::move(breakpoints)),
      segments_(std::move(segments)),
      jumps_(std::move(jumps)),
      anchor_(anchor) {
    if (breakpoints_.size() < 2) throw DomainError("derivator needs at least two breakpoints");
    for (double t : breakpoints_)
        if (!finite(t)) throw DomainError("non-finite breakpoint");
    for (std::size_t k = 0; k + 1 < breakpoints_.size(); ++k)
        if (!(breakpoints_[k] < breakpoints_[k + 1]))
            throw DomainError("breakpoints must be strictly increasing");
    if (segments_.size() + 1 != breakpoints_.size())
        throw DomainError("segment count must be breakpoint count minus one");
    if (!finite(anchor_)) throw DomainError("non-finite anchor");

    normalize_segments();

    for (auto it = jumps_.begin(); it != jumps_.end();) {
        if (!finite(it->second)) throw DomainError("non-finite jump");
        if (!std::binary_search(breakpoints_.begin(), breakpoints_.end(), it->first))
            throw DomainError("jump time is not a breakpoint");
        if (it->first == b()) throw DomainError("jump at the right endpoint is not representable");
        if (it->second == 0.0)
            it = jumps_.erase(it);
        else
            ++it;
    }

    build_aux();

    b_in_ng_plus_ = is_zero(segments_.back());
    if (options.require_b_not_in_ng_plus && b_in_ng_plus_)
        throw DomainError("domain endpoint closes a constancy component");
}

void Derivator::normalize_segments() {
    std::vector<double> bp;
    std::vector<SegmentDensity> segs;
    bp.push_back(breakpoints_.front());

    for (std::size_t k = 0; k < segments_.size(); ++k) {
        const double t0 = breakpoints_[k], t1 = breakpoints_[k + 1];
        SegmentDensity seg = std::move(segments_[k]);

        if (auto* cs = std::get_if<ConstantSlope>(&seg)) {
            if (!finite(cs->slope)) throw DomainError("non-finite slope");
            if (cs->slope == 0.0) seg = ZeroDensity{};
        } else if (auto* pd = std::get_if<PolynomialDensity>(&seg)) {
            for (double c : pd->coeffs)
                if (!finite(c)) throw DomainError("non-finite polynomial coefficient");
            pd->coeffs = poly::trim(std::move(pd->coeffs));
            if (pd->coeffs.empty())
                seg = ZeroDensity{};
            else if (pd->coeffs.size() == 1)
                seg = ConstantSlope{pd->coeffs[0]};
        } else if (auto* sd = std::get_if<SampledDensity>(&seg)) {
            if (sd->values.size() < 2) throw DomainError("sampled density needs at least two nodes");
            for (double v : sd->values)
                if (!finite(v)) throw DomainError("non-finite sampled density value");
            const std::size_t n = cells(*sd);
            bool all_zero = true;
            for (std::size_t j = 0; j + (sd->rule == QuadratureRule::LeftRectangle ? 1 : 0) < sd->values.size(); ++j)
                if (sd->values[j] != 0.0) all_zero = false;
            if (all_zero) {
                seg = ZeroDensity{};
            } else if (sd->rule == QuadratureRule::Trapezoid) {
                for (std::size_t j = 0; j < n; ++j)
                    if (sd->values[j] * sd->values[j + 1] < 0.0)
                        throw DomainError(
                            "trapezoid-sampled density changes sign inside a cell; "
                            "refine the grid or sample the crossing");
            }
        }

        // Split polynomial segments at strict sign changes so that every
        // segment is sign-definite and |density| stays representable.
        if (auto* pd = std::get_if<PolynomialDensity>(&seg)) {
            const auto roots = poly::sign_change_roots(pd->coeffs, 0.0, t1 - t0);
            std::vector<double> coeffs = pd->coeffs;
            double left_local = 0.0;
            for (double r : roots) {
                bp.push_back(t0 + r);
                segs.push_back(PolynomialDensity{poly::shift(pd->coeffs, left_local)});
                left_local = r;
            }
            coeffs = poly::shift(pd->coeffs, left_local);
            bp.push_back(t1);
            segs.push_back(PolynomialDensity{std::move(coeffs)});
        } else {
            bp.push_back(t1);
            segs.push_back(std::move(seg));
        }
    }

    breakpoints_ = std::move(bp);
    segments_ = std::move(segs);
}

void Derivator::build_aux() {
    const std::size_t m = segments_.size();
    aux_.assign(m, {});
    cum_.assign(m + 1, 0.0);
    var_cum_.assign(m + 1, 0.0);
    cum_[0] = anchor_;

    for (std::size_t k = 0; k < m; ++k) {
        const double t0 = breakpoints_[k], t1 = breakpoints_[k + 1];
        const double len = t1 - t0;
        SegmentAux& a = aux_[k];

        if (std::holds_alternative<ZeroDensity>(segments_[k])) {
            a.sign = 0;
        } else if (const auto* cs = std::get_if<ConstantSlope>(&segments_[k])) {
            a.integral = cs->slope * len;
            a.abs_integral = std::abs(a.integral);
            a.sign = sign_of(cs->slope);
        } else if (const auto* pd = std::get_if<PolynomialDensity>(&segments_[k])) {
            a.integral = poly::integral(pd->coeffs, 0.0, len);
            // Sign-definite after splitting: probe for the dominant sign.
            double best = 0.0;
            int s = 0;
            for (int j = 1; j < 16; ++j) {
                const double x = len * j / 16.0;
                const double p = poly::eval(pd->coeffs, x);
                if (std::abs(p) > best) {
                    best = std::abs(p);
                    s = sign_of(p);
                }
            }
            a.sign = s == 0 ? 1 : s;
            a.abs_integral = std::abs(a.integral);
        } else {
            const auto& sd = std::get<SampledDensity>(segments_[k]);
            const std::size_t n = cells(sd);
            const double h = len / static_cast<double>(n);
            a.cell_prefix.assign(n + 1, 0.0);
            a.abs_cell_prefix.assign(n + 1, 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                double cell;
                if (sd.rule == QuadratureRule::LeftRectangle)
                    cell = sd.values[j] * h;
                else
                    cell = 0.5 * (sd.values[j] + sd.values[j + 1]) * h;
                a.cell_prefix[j + 1] = a.cell_prefix[j] + cell;
                a.abs_cell_prefix[j + 1] = a.abs_cell_prefix[j] + std::abs(cell);
            }
            a.integral = a.cell_prefix[n];
            a.abs_integral = a.abs_cell_prefix[n];
            a.sign = 0;
        }

        const double jump = jump_at(breakpoints_[k]);
        cum_[k + 1] = cum_[k] + jump + a.integral;
        var_cum_[k + 1] = var_cum_[k] + std::abs(jump) + a.abs_integral;
        if (!finite(cum_[k + 1])) throw DomainError("derivator accumulates to a non-finite value");
    }
    total_variation_ = var_cum_[m];
}

Derivator Derivator::identity(double a, double b) {
    return Derivator({a, b}, {ConstantSlope{1.0}}, {}, a);
}

Derivator Derivator::constant(double a, double b, double value) {
    return Derivator({a, b}, {ZeroDensity{}}, {}, value);
}

std::size_t Derivator::segment_of(double t) const {
    const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t);
    const std::size_t idx = static_cast<std::size_t>(it - breakpoints_.begin());
    return idx == 0 ? 0 : idx - 1;
}

double Derivator::segment_prefix(std::size_t k, double t, bool absolute) const {
    const double t0 = breakpoints_[k];
    const double len = breakpoints_[k + 1] - t0;
    const double x = t - t0;
    const SegmentAux& a = aux_[k];

    if (std::holds_alternative<ZeroDensity>(segments_[k])) return 0.0;
    if (const auto* cs = std::get_if<ConstantSlope>(&segments_[k]))
        return (absolute ? std::abs(cs->slope) : cs->slope) * x;
    if (const auto* pd = std::get_if<PolynomialDensity>(&segments_[k])) {
        const double v = poly::integral(pd->coeffs, 0.0, x);
        return absolute ? std::abs(v) : v;
    }

    const auto& sd = std::get<SampledDensity>(segments_[k]);
    const std::size_t n = cells(sd);
    const double h = len / static_cast<double>(n);
    auto j = static_cast<std::size_t>(std::floor(x / h));
    if (j >= n) j = n - 1;
    const double xr = x - h * static_cast<double>(j);
    double partial;
    if (sd.rule == QuadratureRule::LeftRectangle) {
        partial = sd.values[j] * xr;
    } else {
        const double vt = sd.values[j] + (sd.values[j + 1] - sd.values[j]) * (xr / h);
        partial = 0.5 * (sd.values[j] + vt) * xr;
    }
    if (absolute) return a.abs_cell_prefix[j] + std::abs(partial);
    return a.cell_prefix[j] + partial;
}

double Derivator::eval(double t) const {
    if (!(t >= a() && t <= b())) throw DomainError("evaluation time outside the domain");
    if (t == a()) return anchor_;
    const std::size_t k = segment_of(t);
    return cum_[k] + jump_at(breakpoints_[k]) + segment_prefix(k, t, false);
}

double Derivator::eval_right(double t) const { return eval(t) + jump_at(t); }

double Derivator::jump_at(double t) const {
    const auto it = jumps_.find(t);
    return it == jumps_.end() ? 0.0 : it->second;
}

double Derivator::scale() const { return std::max(1.0, total_variation_); }

double Derivator::density_integral(double u, double v) const {
    if (!(u >= a() && v <= b() && u <= v)) throw DomainError("bad interval for density integral");
    auto prefix = [this](double t) {
        if (t == a()) return 0.0;
        const std::size_t k = segment_of(t);
        double acc = 0.0;
        for (std::size_t j = 0; j < k; ++j) acc += aux_[j].integral;
        return acc + segment_prefix(k, t, false);
    };
    return prefix(v) - prefix(u);
}

double Derivator::abs_density_integral(double u, double v) const {
    if (!(u >= a() && v <= b() && u <= v)) throw DomainError("bad interval for density integral");
    auto prefix = [this](double t) {
        if (t == a()) return 0.0;
        const std::size_t k = segment_of(t);
        double acc = 0.0;
        for (std::size_t j = 0; j < k; ++j) acc += aux_[j].abs_integral;
        return acc + segment_prefix(k, t, true);
    };
    return prefix(v) - prefix(u);
}

double Derivator::density_value(double t) const {
    if (!(t >= a() && t <= b())) throw DomainError("evaluation time outside the domain");
    // At a shared breakpoint read the segment to the right; at b, the last.
    std::size_t k;
    if (t == a()) {
        k = 0;
    } else {
        k = segment_of(t);
        if (t == breakpoints_[k + 1] && k + 1 < segments_.size()) k += 1;
    }
    const double t0 = breakpoints_[k];
    if (std::holds_alternative<ZeroDensity>(segments_[k])) return 0.0;
    if (const auto* cs = std::get_if<ConstantSlope>(&segments_[k])) return cs->slope;
    if (const auto* pd = std::get_if<PolynomialDensity>(&segments_[k]))
        return poly::eval(pd->coeffs, t - t0);
    const auto& sd = std::get<SampledDensity>(segments_[k]);
    const std::size_t n = cells(sd);
    const double h = (breakpoints_[k + 1] - t0) / static_cast<double>(n);
    auto j = static_cast<std::size_t>(std::floor((t - t0) / h));
    if (j >= n) j = n - 1;
    if (sd.rule == QuadratureRule::LeftRectangle) return sd.values[j];
    const double xr = t - t0 - h * static_cast<double>(j);
    return sd.values[j] + (sd.values[j + 1] - sd.values[j]) * (xr / h);
}

Derivator variation(const Derivator& g) {
    std::vector<SegmentDensity> segs;
    segs.reserve(g.segments_.size());
    for (std::size_t k = 0; k < g.segments_.size(); ++k) {
        const auto& s = g.segments_[k];
        if (std::holds_alternative<ZeroDensity>(s)) {
            segs.push_back(ZeroDensity{});
        } else if (const auto* cs = std::get_if<ConstantSlope>(&s)) {
            segs.push_back(ConstantSlope{std::abs(cs->slope)});
        } else if (const auto* pd = std::get_if<PolynomialDensity>(&s)) {
            auto c = pd->coeffs;
            if (g.aux_[k].sign < 0)
                for (double& x : c) x = -x;
            segs.push_back(PolynomialDensity{std::move(c)});
        } else {
            auto sd = std::get<SampledDensity>(s);
            for (double& v : sd.values) v = std::abs(v);
            segs.push_back(std::move(sd));
        }
    }
    std::map<double, double> jumps;
    for (const auto& [t, d] : g.jumps_) jumps[t] = std::abs(d);
    return Derivator(g.breakpoints_, std::move(segs), std::move(jumps), 0.0);
}

std::pair<Derivator, Derivator> jordan(const Derivator& g) {
    std::vector<SegmentDensity> pos, neg;
    pos.reserve(g.segments_.size());
    neg.reserve(g.segments_.size());
    for (std::size_t k = 0; k < g.segments_.size(); ++k) {
        const auto& s = g.segments_[k];
        if (std::holds_alternative<ZeroDensity>(s)) {
            pos.push_back(ZeroDensity{});
            neg.push_back(ZeroDensity{});
        } else if (const auto* cs = std::get_if<ConstantSlope>(&s)) {
            if (cs->slope >= 0.0) {
                pos.push_back(*cs);
                neg.push_back(ZeroDensity{});
            } else {
                pos.push_back(ZeroDensity{});
                neg.push_back(ConstantSlope{-cs->slope});
            }
        } else if (const auto* pd = std::get_if<PolynomialDensity>(&s)) {
            if (g.aux_[k].sign >= 0) {
                pos.push_back(*pd);
                neg.push_back(ZeroDensity{});
            } else {
                auto c = pd->coeffs;
                for (double& x : c) x = -x;
                pos.push_back(ZeroDensity{});
                neg.push_back(PolynomialDensity{std::move(c)});
            }
        } else {
            const auto& sd = std::get<SampledDensity>(s);
            SampledDensity p{std::vector<double>(sd.values.size()), sd.rule};
            SampledDensity n{std::vector<double>(sd.values.size()), sd.rule};
            for (std::size_t j = 0; j < sd.values.size(); ++j) {
                p.values[j] = std::max(sd.values[j], 0.0);
                n.values[j] = std::max(-sd.values[j], 0.0);
            }
            pos.push_back(std::move(p));
            neg.push_back(std::move(n));
        }
    }
    std::map<double, double> jp, jn;
    for (const auto& [t, d] : g.jumps_)
        (d > 0.0 ? jp[t] : jn[t]) = std::abs(d);
    return {Derivator(g.breakpoints_, std::move(pos), std::move(jp), 0.0),
            Derivator(g.breakpoints_, std::move(neg), std::move(jn), 0.0)};
}

std::vector<std::pair<double, double>> constancy_components(const Derivator& g) {
    std::vector<std::pair<double, double>> out;
    const auto& bp = g.breakpoints();
    const auto& segs = g.segments();
    for (std::size_t k = 0; k < segs.size(); ++k) {
        if (!is_zero(segs[k])) continue;
        const bool extends = !out.empty() && out.back().second == bp[k] && g.jump_at(bp[k]) == 0.0;
        if (extends)
            out.back().second = bp[k + 1];
        else
            out.emplace_back(bp[k], bp[k + 1]);
    }
    return out;
}

PointClass classify_point(const Derivator& g, double t) {
    if (!(t >= g.a() && t <= g.b())) throw DomainError("classification time outside the domain");
    if (g.jump_at(t) != 0.0) return {PointTag::Jump, t};

    const auto comps = constancy_components(g);
    for (const auto& [lo, hi] : comps) {
        if (t > lo && t < hi) return {PointTag::ConstancyInterior, hi};
        if (t == lo) {
            if (t == g.a()) return {PointTag::Regular, hi};  // start abuts the domain edge
            return {PointTag::NgMinus, t};
        }
        if (t == hi) return {PointTag::NgPlus, t};
    }
    return {PointTag::Regular, t};
}

namespace {

// Restriction of one segment density to [u, v], re-based at u.
SegmentDensity restrict_density(const Derivator& g, std::size_t k, double u, double v) {
    const auto& s = g.segments()[k];
    const double t0 = g.breakpoints()[k], t1 = g.breakpoints()[k + 1];
    if (std::holds_alternative<ZeroDensity>(s) || std::holds_alternative<ConstantSlope>(s)) return s;
    if (const auto* pd = std::get_if<PolynomialDensity>(&s))
        return PolynomialDensity{poly::shift(pd->coeffs, u - t0)};

    const auto& sd = std::get<SampledDensity>(s);
    const std::size_t n = cells(sd);
    const double h = (t1 - t0) / static_cast<double>(n);
    auto node_index = [&](double t) -> std::size_t {
        const double r = (t - t0) / h;
        const auto j = static_cast<std::size_t>(std::llround(r));
        if (j > n || std::abs(r - static_cast<double>(j)) > 1e-9)
            throw DomainError("sum would split a sampled segment off its node grid");
        return j;
    };
    const std::size_t ju = node_index(u), jv = node_index(v);
    SampledDensity out{std::vector<double>(sd.values.begin() + static_cast<std::ptrdiff_t>(ju),
                                           sd.values.begin() + static_cast<std::ptrdiff_t>(jv) + 1),
                       sd.rule};
    return out;
}

SegmentDensity combine(SegmentDensity acc, const SegmentDensity& add, double len) {
    if (std::holds_alternative<ZeroDensity>(add)) return acc;
    if (std::holds_alternative<ZeroDensity>(acc)) return add;

    if (auto* ca = std::get_if<ConstantSlope>(&acc)) {
        if (const auto* cb = std::get_if<ConstantSlope>(&add)) return ConstantSlope{ca->slope + cb->slope};
        return combine(add, acc, len);  // fold the slope into the richer kind
    }
    if (auto* pa = std::get_if<PolynomialDensity>(&acc)) {
        if (const auto* cb = std::get_if<ConstantSlope>(&add)) {
            if (pa->coeffs.empty()) pa->coeffs.push_back(0.0);
            pa->coeffs[0] += cb->slope;
            return acc;
        }
        if (const auto* pb = std::get_if<PolynomialDensity>(&add)) {
            if (pa->coeffs.size() < pb->coeffs.size()) pa->coeffs.resize(pb->coeffs.size(), 0.0);
            for (std::size_t j = 0; j < pb->coeffs.size(); ++j) pa->coeffs[j] += pb->coeffs[j];
            return acc;
        }
        throw DomainError("cannot combine a polynomial density with a sampled density");
    }

    auto& sa = std::get<SampledDensity>(acc);
    if (const auto* cb = std::get_if<ConstantSlope>(&add)) {
        for (double& v : sa.values) v += cb->slope;
        return acc;
    }
    if (const auto* sb = std::get_if<SampledDensity>(&add)) {
        if (sa.rule != sb->rule) throw DomainError("cannot combine sampled densities with different rules");
        const std::size_t na = sa.values.size() - 1, nb = sb->values.size() - 1;
        if (na == nb) {
            for (std::size_t j = 0; j < sa.values.size(); ++j) sa.values[j] += sb->values[j];
            return acc;
        }
        const std::size_t n = std::lcm(na, nb);
        if (n > 1000000) throw DomainError("sampled grids are too incommensurate to combine");
        SampledDensity out{std::vector<double>(n + 1, 0.0), sa.rule};
        for (std::size_t j = 0; j <= n; ++j) {
            if (sa.rule == QuadratureRule::LeftRectangle) {
                const std::size_t ja = std::min(j * na / n, na - 1);
                const std::size_t jb = std::min(j * nb / n, nb - 1);
                out.values[j] = sa.values[ja] + sb->values[jb];
            } else {
                auto interp = [&](const std::vector<double>& v, std::size_t m) {
                    const double x = static_cast<double>(j) * static_cast<double>(m) / static_cast<double>(n);
                    auto i = static_cast<std::size_t>(std::floor(x));
                    if (i >= m) i = m - 1;
                    return v[i] + (v[i + 1] - v[i]) * (x - static_cast<double>(i));
                };
                out.values[j] = interp(sa.values, na) + interp(sb->values, nb);
            }
        }
        return out;
    }
    throw DomainError("cannot combine a polynomial density with a sampled density");
}

}  // namespace

Derivator sum(const std::vector<Derivator>& gs) {
    if (gs.empty()) throw DomainError("sum of zero derivators");
    const double a = gs.front().a(), b = gs.front().b();
    for (const auto& g : gs)
        if (g.a() != a || g.b() != b) throw DomainError("summands live on different domains");

    std::vector<double> bp;
    for (const auto& g : gs) bp.insert(bp.end(), g.breakpoints().begin(), g.breakpoints().end());
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

    std::vector<SegmentDensity> segs;
    segs.reserve(bp.size() - 1);
    for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
        SegmentDensity acc = ZeroDensity{};
        for (const auto& g : gs) {
            const auto it = std::upper_bound(g.breakpoints().begin(), g.breakpoints().end(), bp[k]);
            const auto kk = static_cast<std::size_t>(it - g.breakpoints().begin()) - 1;
            acc = combine(std::move(acc), restrict_density(g, kk, bp[k], bp[k + 1]), bp[k + 1] - bp[k]);
        }
        segs.push_back(std::move(acc));
    }

    std::map<double, double> jumps;
    for (const auto& g : gs)
        for (const auto& [t, d] : g.jumps()) jumps[t] += d;

    double anchor = 0.0;
    for (const auto& g : gs) anchor += g.anchor();
    return Derivator(std::move(bp), std::move(segs), std::move(jumps), anchor);
}

}  // namespace stieltjes
