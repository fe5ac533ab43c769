// Walks the N poset through every representation.
#include <iostream>

#include "posetnn/posetnn.hpp"

using namespace posetnn;

int main()
{
    const Poset n = parse_poset("4; 0<2, 1<2, 1<3");
    const auto names = variable_names(n.size());

    std::cout << "poset " << format_poset(n) << ", " << count_linear_extensions(n) << " linear extensions\n";
    for (const auto& e : linear_extensions(n)) {
        std::cout << "  ";
        for (auto i : e.perm)
            std::cout << names[i];
        std::cout << "\n";
    }

    const auto poly = order_polytope_vertices(n);
    std::cout << "order polytope: " << poly.size() << " vertices\n";

    const auto f = tr_of_poset(n);
    std::cout << "Tr = " << format_tropical(f) << "\n";
    std::cout << "recovered: " << format_poset(poset_from_tropical(f)) << "\n";

    const std::vector<double> x{-1.0, 0.0, 1.9, 2.0};
    const auto net = poset_nn(n);
    std::cout << "nn(x) = " << eval_combined(net, x) << ", Tr(x) = " << eval_tropical(f, x) << "\n";

    const auto filt = filter_from_poset(n);
    const auto fv = forward(filt, x);
    std::cout << "filter value " << fv.value << ", winning term";
    for (double c : filt.terms[fv.term])
        std::cout << " " << c;
    std::cout << "\n";

    const auto p = act_on_tropical_shared(parse_poset("2; 0<1"),
                                          {parse_tropical("x", 3), parse_tropical("z", 3)});
    std::cout << "[x < z] acting on (x, z): " << format_tropical(p) << "\n";
    return eval_combined(net, x) == eval_tropical(f, x) ? 0 : 1;
}
