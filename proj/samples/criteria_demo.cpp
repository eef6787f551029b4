// Minimal library walkthrough: build a coefficient spec, run the criteria
// battery, and look at a truncation spectrum.

#include <iostream>

#include "jacobi/coeffseq.hpp"
#include "jacobi/conditions.hpp"
#include "jacobi/spectra.hpp"

int main() {
    using namespace jacobi;

    // a_n = n^2, b_n = n^3
    const seq::CoefficientSpec spec = seq::power_spec(1.0, Rational{2}, 1.0, Rational{3});

    const auto battery = conditions::run_battery(spec, 4);
    std::cout << "conclusion: " << battery.conclusion() << "\n";
    for (const auto& v : battery.verdicts)
        if (v.outcome == conditions::Outcome::Holds)
            std::cout << "  holds: " << v.display_name() << "\n";

    const auto t = spectra::truncate(spec, 8);
    std::cout << "lowest eigenvalues of the order-8 truncation:";
    for (double ev : spectra::eigenvalues(t, 1e-12)) std::cout << " " << ev;
    std::cout << "\n";
    return 0;
}
