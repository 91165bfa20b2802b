#include "causabs/abstraction.hpp"
#include "causabs/inference.hpp"
#include "detail.hpp"

namespace causabs {

Abstraction construct_abstraction(const Scm& scm, const InterClustering& inter, const IntraClustering& intra,
                                  const EvalOptions& opt) {
    ConstructiveTau tau(scm.variables(), inter, intra);
    if (!check_admissible(inter, induced_diagram(scm)))
        throw ValidationError("clustering is not admissible for the model's diagram");
    auto rep = check_aic(scm, tau, opt);
    if (!rep.holds) throw AicError("the model violates the AIC for this abstraction", rep);

    auto radix_u = scm.exo_radix();
    std::vector<Mechanism> mechs;
    for (int c = 0; c < tau.n_clusters(); ++c) {
        auto in = detail::cluster_inputs(scm, tau, c);
        Mechanism m;
        m.output = tau.high_vars()[c].name;
        std::vector<int> radix;
        for (int p : in.parents) {
            m.endo_parents.push_back(tau.high_vars()[p].name);
            radix.push_back(tau.high_vars()[p].domain.size());
        }
        for (int e : in.exo) {
            m.exo_parents.push_back(scm.exogenous()[e].name);
            radix.push_back(radix_u[e]);
        }
        std::size_t np = in.parents.size();
        std::vector<int> d(radix.size(), 0), u(scm.n_exo(), 0);
        std::vector<std::size_t> joints(np);
        do {
            // first preimage of each high parent value; any other gives the same output under the AIC
            for (std::size_t k = 0; k < np; ++k) joints[k] = tau.preimage(in.parents[k], d[k]).front();
            for (std::size_t e = 0; e < in.exo.size(); ++e) u[in.exo[e]] = d[np + e];
            auto x = detail::parent_intervention(scm, tau, in.parents, joints);
            m.table.push_back(tau.image_of(c, evaluate_unit(scm, u, x)));
        } while (next_digits(d, radix));
        mechs.push_back(std::move(m));
    }
    Scm high(tau.high_vars(), scm.exogenous(), std::move(mechs));
    return Abstraction{std::move(tau), std::move(high)};
}

} // namespace causabs
