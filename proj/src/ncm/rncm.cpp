#include <cmath>
#include <random>

#include "causabs/errors.hpp"
#include "causabs/ncm.hpp"

namespace causabs {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd RepMap::encode(const MatrixXd& x) const {
    return (x * enc.transpose()).rowwise() + enc_bias.transpose();
}

MatrixXd RepMap::decode(const MatrixXd& z) const {
    return (z * dec.transpose()).rowwise() + dec_bias.transpose();
}

namespace {

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// Adam over a list of parameter blocks viewed as flat arrays.
struct Adam {
    double lr = 0.01, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    int t = 0;
    std::vector<VectorXd> m, v;

    void step(const std::vector<double*>& p, const std::vector<const double*>& g, const std::vector<int>& n) {
        if (m.empty())
            for (int k : n) m.push_back(VectorXd::Zero(k)), v.push_back(VectorXd::Zero(k));
        ++t;
        double c1 = 1 - std::pow(b1, t), c2 = 1 - std::pow(b2, t);
        for (std::size_t b = 0; b < p.size(); ++b)
            for (int i = 0; i < n[b]; ++i) {
                m[b][i] = b1 * m[b][i] + (1 - b1) * g[b][i];
                v[b][i] = b2 * v[b][i] + (1 - b2) * g[b][i] * g[b][i];
                p[b][i] -= lr * (m[b][i] / c1) / (std::sqrt(v[b][i] / c2) + eps);
            }
    }
};

} // namespace

RepResult fit_representation(const MatrixXd& data, const RepConfig& cfg, const std::vector<int>* labels) {
    const long n = data.rows(), d = data.cols();
    if (n == 0 || d == 0) throw ValidationError("representation data is empty");
    if (cfg.rep_dim < 1) throw ValidationError("rep_dim must be positive");
    if (cfg.lambda_r < 0) throw ValidationError("lambda_r must be non-negative");
    bool aux = cfg.lambda_r > 0;
    if (aux && (!labels || static_cast<long>(labels->size()) != n))
        throw ValidationError("auxiliary loss needs one label per row");

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> nd(0.0, 1.0 / std::sqrt(static_cast<double>(d)));
    RepMap map;
    map.enc = MatrixXd::NullaryExpr(cfg.rep_dim, d, [&] { return nd(rng); });
    map.dec = map.enc.transpose();
    map.enc_bias = VectorXd::Zero(cfg.rep_dim);
    map.dec_bias = VectorXd::Zero(d);
    if (aux) map.aux_w = VectorXd::Zero(cfg.rep_dim);
    VectorXd y(n);
    if (aux)
        for (long i = 0; i < n; ++i) y[i] = (*labels)[i] ? 1.0 : 0.0;

    Adam opt;
    opt.lr = cfg.lr;
    std::vector<int> sizes = {static_cast<int>(map.enc.size()), static_cast<int>(map.dec.size()), cfg.rep_dim,
                              static_cast<int>(d)};
    if (aux) sizes.push_back(cfg.rep_dim), sizes.push_back(1);

    RepResult res;
    for (int it = 0; it <= cfg.iterations; ++it) {
        MatrixXd z = map.encode(data);
        MatrixXd err = map.decode(z) - data;
        double rec = err.squaredNorm() / n;
        double auxl = 0;
        MatrixXd dz = 2.0 / n * err * map.dec;  // n x k
        VectorXd gw;
        double gb = 0;
        if (aux) {
            VectorXd s = ((z * map.aux_w).array() + map.aux_b).unaryExpr(&sigmoid);
            for (long i = 0; i < n; ++i) auxl -= y[i] * std::log(std::max(s[i], 1e-12)) + (1 - y[i]) * std::log(std::max(1 - s[i], 1e-12));
            auxl /= n;
            VectorXd r = (s - y) / n;
            gw = cfg.lambda_r * z.transpose() * r;
            gb = cfg.lambda_r * r.sum();
            dz += cfg.lambda_r * r * map.aux_w.transpose();
        }
        if (!std::isfinite(rec) || !std::isfinite(auxl)) throw Error("representation fit diverged");
        res.reconstruction = rec;
        res.aux_loss = auxl;
        if (it == cfg.iterations) break;

        MatrixXd gdec = 2.0 / n * err.transpose() * z;
        VectorXd gdb = 2.0 / n * err.colwise().sum().transpose();
        MatrixXd genc = dz.transpose() * data;
        VectorXd geb = dz.colwise().sum().transpose();
        std::vector<double*> p = {map.enc.data(), map.dec.data(), map.enc_bias.data(), map.dec_bias.data()};
        std::vector<const double*> g = {genc.data(), gdec.data(), geb.data(), gdb.data()};
        if (aux) {
            p.push_back(map.aux_w.data()), p.push_back(&map.aux_b);
            g.push_back(gw.data()), g.push_back(&gb);
        }
        opt.step(p, g, sizes);
    }
    res.map = map;
    return res;
}

double LinearProbe::accuracy(const MatrixXd& x, const std::vector<int>& labels) const {
    if (x.rows() == 0) return 0;
    VectorXd s = x * w;
    int hit = 0;
    for (long i = 0; i < x.rows(); ++i) hit += ((s[i] + b > 0) == (labels[i] != 0));
    return static_cast<double>(hit) / x.rows();
}

LinearProbe fit_linear_probe(const MatrixXd& x, const std::vector<int>& labels, int iterations, double lr) {
    if (static_cast<long>(labels.size()) != x.rows()) throw ValidationError("one label per row is required");
    LinearProbe p;
    p.w = VectorXd::Zero(x.cols());
    const long n = x.rows();
    VectorXd y(n);
    for (long i = 0; i < n; ++i) y[i] = labels[i] ? 1.0 : 0.0;
    for (int it = 0; it < iterations; ++it) {
        VectorXd s = ((x * p.w).array() + p.b).unaryExpr(&sigmoid);
        VectorXd r = (s - y) / n;
        p.w -= lr * x.transpose() * r;
        p.b -= lr * r.sum();
    }
    return p;
}

} // namespace causabs
