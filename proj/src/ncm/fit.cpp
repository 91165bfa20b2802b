#include <cmath>

#include "causabs/errors.hpp"
#include "causabs/ncm.hpp"

namespace causabs {

namespace {

double lambda_at(const TrainConfig& cfg, int t) {
    if (cfg.iterations <= 1 || cfg.lambda_start <= 0 || cfg.lambda_end <= 0) return cfg.lambda_start;
    double f = static_cast<double>(t) / (cfg.iterations - 1);
    return cfg.lambda_start * std::pow(cfg.lambda_end / cfg.lambda_start, f);
}

double data_loss(const Ncm& m, const std::vector<InterventionalPmf>& data, Eigen::VectorXd* grad,
                 const EvalOptions& opt) {
    double loss = 0;
    if (grad) grad->setZero(m.n_params());
    Eigen::VectorXd g;
    for (const auto& d : data) {
        loss += cross_entropy(m, d, grad ? &g : nullptr, opt);
        if (grad) *grad += g;
    }
    return loss;
}

} // namespace

FitResult fit(Ncm& m, const std::vector<InterventionalPmf>& data, const std::optional<QueryReg>& reg,
              const TrainConfig& cfg, const EvalOptions& opt) {
    if (cfg.iterations < 0) throw ValidationError("iterations must be non-negative");
    FitResult res;
    for (const auto& d : data) res.data_entropy += entropy(d.pmf);
    res.initial_data_loss = data_loss(m, data, nullptr, opt);

    Eigen::VectorXd theta = m.params();
    // -inf logits stay frozen; only finite entries move
    Eigen::ArrayXd live = theta.array().isFinite().cast<double>();
    Eigen::VectorXd mom = Eigen::VectorXd::Zero(theta.size()), var = mom;
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    Eigen::VectorXd g, gq;

    for (int t = 0; t < cfg.iterations; ++t) {
        double lam = lambda_at(cfg, t);
        double dl = data_loss(m, data, &g, opt);
        if (!std::isfinite(dl)) throw Error("fit diverged: data loss is not finite");
        double qv = 0;
        if (reg) {
            try {
                qv = ctf_pmf(m, reg->query, &gq, opt);
                g += reg->sign * lam * gq;
            } catch (const UndefinedConditional&) {
                qv = std::nan("");
            }
        }
        if (cfg.record_every > 0 && t % cfg.record_every == 0) res.series.push_back({t, dl, qv, lam});

        g = (g.array() * live).matrix();
        if (!g.allFinite()) throw Error("fit diverged: gradient is not finite");
        if (cfg.optimizer == Optimizer::Adam) {
            mom = b1 * mom + (1 - b1) * g;
            var = b2 * var + (1 - b2) * g.cwiseProduct(g);
            double c1 = 1 - std::pow(b1, t + 1), c2 = 1 - std::pow(b2, t + 1);
            for (int i = 0; i < theta.size(); ++i)
                if (live[i] > 0) theta[i] -= cfg.lr * (mom[i] / c1) / (std::sqrt(var[i] / c2) + eps);
        } else {
            for (int i = 0; i < theta.size(); ++i)
                if (live[i] > 0) theta[i] -= cfg.lr * g[i];
        }
        m.set_params(theta);
    }

    res.data_loss = data_loss(m, data, nullptr, opt);
    if (reg) {
        try {
            res.query_value = ctf_pmf(m, reg->query, nullptr, opt);
        } catch (const UndefinedConditional&) {
        }
    }
    res.series.push_back({cfg.iterations, res.data_loss, res.query_value.value_or(std::nan("")), lambda_at(cfg, cfg.iterations - 1)});
    return res;
}

} // namespace causabs
