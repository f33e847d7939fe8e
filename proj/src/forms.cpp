#include "rk4/forms.hpp"

#include "rk4/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rk4 {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::int64_t xgcd(std::int64_t a, std::int64_t b, std::int64_t& s, std::int64_t& t)
{
    std::int64_t s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (b != 0) {
        std::int64_t q = a / b;
        std::tie(a, b) = std::make_pair(b, a - q * b);
        std::tie(s0, s1) = std::make_pair(s1, s0 - q * s1);
        std::tie(t0, t1) = std::make_pair(t1, t0 - q * t1);
    }
    if (a < 0) {
        a = -a;
        s0 = -s0;
        t0 = -t0;
    }
    s = s0;
    t = t0;
    return a;
}

Form normalize(Form f)
{
    std::int64_t disc = f.discriminant();
    std::int64_t k = floor_div(f.a - f.b, 2 * f.a);
    f.b += 2 * k * f.a;
    f.c = (f.b * f.b - disc) / (4 * f.a);
    return f;
}

}  // namespace

Form reduce(Form f)
{
    if (f.a <= 0 || f.discriminant() >= 0) throw std::invalid_argument("reduce: form is not positive definite");
    f = normalize(f);
    while (f.a > f.c) {
        std::swap(f.a, f.c);
        f.b = -f.b;
        f = normalize(f);
    }
    if (f.a == f.c && f.b < 0) f.b = -f.b;
    return f;
}

Form compose(const Form& f, const Form& g)
{
    const std::int64_t disc = f.discriminant();
    if (g.discriminant() != disc) throw std::invalid_argument("compose: discriminants differ");
    Form f1 = f, f2 = g;
    if (f1.a > f2.a) std::swap(f1, f2);
    std::int64_t s = (f1.b + f2.b) / 2;
    std::int64_t n = f2.b - s;
    std::int64_t y1, d;
    if (f2.a % f1.a == 0) {
        y1 = 0;
        d = f1.a;
    } else {
        std::int64_t u, v;
        d = xgcd(f2.a, f1.a, u, v);
        y1 = u;
    }
    std::int64_t x2, y2, d1;
    if (s % d == 0) {
        y2 = -1;
        x2 = 0;
        d1 = d;
    } else {
        d1 = xgcd(s, d, x2, y2);
        y2 = -y2;
    }
    std::int64_t v1 = f1.a / d1, v2 = f2.a / d1;
    std::int64_t r = (y1 * y2 * n - x2 * f2.c) % v1;
    if (r < 0) r += v1;
    Form h;
    h.b = f2.b + 2 * v2 * r;
    h.a = v1 * v2;
    h.c = (h.b * h.b - disc) / (4 * h.a);
    return reduce(h);
}

Form identity_form(std::int64_t disc)
{
    if (disc >= 0 || ((disc % 4) + 4) % 4 != 1) throw std::invalid_argument("identity_form: expected negative discriminant = 1 mod 4");
    return {1, 1, (1 - disc) / 4};
}

Form inverse(const Form& f)
{
    return reduce({f.a, -f.b, f.c});
}

FormClassGroup::FormClassGroup(std::int64_t D) : D_(D)
{
    if (D <= 3 || D % 4 != 3) throw std::invalid_argument("FormClassGroup: expected D = 3 mod 4 with D > 3, got " + std::to_string(D));
    for (std::int64_t a = 1; 3 * a * a <= D; ++a) {
        for (std::int64_t b = -a + 1; b <= a; ++b) {
            if ((b & 1) == 0) continue;
            std::int64_t num = b * b + D;
            if (num % (4 * a) != 0) continue;
            std::int64_t c = num / (4 * a);
            if (c < a || (c == a && b < 0)) continue;
            if (std::gcd(std::gcd(a, std::abs(b)), c) != 1) continue;
            index_[{a, b, c}] = static_cast<int>(forms_.size());
            forms_.push_back({a, b, c});
        }
    }
    identity_ = index_of(identity_form(-D));
}

int FormClassGroup::index_of(const Form& f) const
{
    auto it = index_.find(reduce(f));
    if (it == index_.end()) throw std::logic_error("form not found among reduced forms");
    return it->second;
}

int FormClassGroup::mul(int x, int y) const
{
    return index_of(compose(forms_[x], forms_[y]));
}

int FormClassGroup::pow(int x, std::int64_t e) const
{
    int result = identity_;
    int base = x;
    while (e > 0) {
        if (e & 1) result = mul(result, base);
        base = mul(base, base);
        e >>= 1;
    }
    return result;
}

std::vector<std::int64_t> FormClassGroup::invariant_factors() const
{
    const std::int64_t h = order();
    // parts[p] = exponents of the p-primary cyclic factors, descending.
    std::vector<std::vector<std::int64_t>> prime_parts;
    for (u64 p : prime_divisors(static_cast<u64>(h))) {
        std::int64_t pp = static_cast<std::int64_t>(p);
        int vp = 0;
        for (std::int64_t t = h; t % pp == 0; t /= pp) ++vp;
        std::vector<int> log_counts{0};
        std::int64_t pe = 1;
        while (log_counts.back() < vp) {
            pe *= pp;
            std::int64_t count = 0;
            for (int x = 0; x < order(); ++x)
                if (pow(x, pe) == identity_) ++count;
            int lg = 0;
            while (count > 1) {
                count /= pp;
                ++lg;
            }
            log_counts.push_back(lg);
        }
        // at_least[e] = number of cyclic factors of order >= p^e.
        std::vector<int> at_least(log_counts.size() + 1, 0);
        for (std::size_t e = 1; e < log_counts.size(); ++e) at_least[e] = log_counts[e] - log_counts[e - 1];
        std::vector<std::int64_t> parts;
        for (std::size_t e = 1; e < log_counts.size(); ++e) {
            int exactly = at_least[e] - at_least[e + 1];
            std::int64_t q = 1;
            for (std::size_t i = 0; i < e; ++i) q *= pp;
            for (int i = 0; i < exactly; ++i) parts.push_back(q);
        }
        std::sort(parts.begin(), parts.end(), std::greater<>());
        prime_parts.push_back(parts);
    }
    std::size_t len = 0;
    for (const auto& v : prime_parts) len = std::max(len, v.size());
    std::vector<std::int64_t> out(len, 1);
    for (const auto& v : prime_parts)
        for (std::size_t i = 0; i < v.size(); ++i) out[i] *= v[i];
    std::sort(out.begin(), out.end());
    return out;
}

std::int64_t FormClassGroup::generated_order(const std::vector<int>& gens) const
{
    std::vector<char> seen(forms_.size(), 0);
    std::vector<int> stack{identity_};
    seen[identity_] = 1;
    std::int64_t count = 1;
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        for (int g : gens) {
            int y = mul(x, g);
            if (!seen[y]) {
                seen[y] = 1;
                ++count;
                stack.push_back(y);
            }
        }
    }
    return count;
}

}  // namespace rk4
