#pragma once

#include <cstdint>
#include <map>
#include <vector>

namespace rk4 {

// Positive definite binary quadratic form a x^2 + b xy + c y^2.
struct Form {
    std::int64_t a, b, c;
    auto operator<=>(const Form&) const = default;

    std::int64_t discriminant() const { return b * b - 4 * a * c; }
};

Form reduce(Form f);
Form compose(const Form& f, const Form& g);
Form identity_form(std::int64_t disc);
Form inverse(const Form& f);

// Form class group of discriminant -D for squarefree D = 3 mod 4, D > 3.
class FormClassGroup {
public:
    explicit FormClassGroup(std::int64_t D);

    std::int64_t D() const { return D_; }
    std::int64_t order() const { return static_cast<std::int64_t>(forms_.size()); }
    const std::vector<Form>& forms() const { return forms_; }
    int index_of(const Form& f) const;

    int mul(int x, int y) const;
    int pow(int x, std::int64_t e) const;

    // Invariant factors d_1 | d_2 | ..., ones dropped.
    std::vector<std::int64_t> invariant_factors() const;
    // Size of the subgroup generated by the given classes.
    std::int64_t generated_order(const std::vector<int>& gens) const;

private:
    std::int64_t D_;
    std::vector<Form> forms_;
    std::map<Form, int> index_;
    int identity_;
};

}  // namespace rk4
