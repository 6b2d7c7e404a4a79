#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "errors.hpp"
#include "rng.hpp"
#include "svd.hpp"

namespace askl {
namespace {

loss_kind loss_for(task_kind task) {
    return task == task_kind::classification ? loss_kind::multiclass_hinge
                                             : loss_kind::squared;
}

double nuclear_norm(const matrix& m) {
    svd_result svd = thin_svd(m);
    return std::accumulate(svd.singular_values.begin(), svd.singular_values.end(), 0.0);
}

batch batch_of(const dataset& ds, std::span<const std::size_t> idx) {
    batch b;
    b.inputs = matrix(idx.size(), ds.dim());
    b.labels.reserve(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t j = 0; j < ds.dim(); ++j) b.inputs(i, j) = ds.x(idx[i], j);
        b.labels.push_back(ds.labels[idx[i]]);
    }
    return b;
}

void check_finite_params(const matrix& w, const frequency_pack& pack, bool trained,
                         std::int64_t iteration) {
    bool ok = all_finite(w);
    if (ok && trained) ok = all_finite(pack.omega) && all_finite(pack.omega_prime);
    if (!ok)
        throw diverged_error(
            "training diverged: non-finite parameter at iteration " +
                std::to_string(iteration),
            iteration);
}

}  // namespace

variant variant::preset(variant_kind kind) {
    switch (kind) {
        case variant_kind::sk:
            return {kernel_kind::stationary, false, weight_reg::squared_frobenius, false};
        case variant_kind::nsk:
            return {kernel_kind::non_stationary, false, weight_reg::squared_frobenius, false};
        case variant_kind::skl:
            return {kernel_kind::stationary, true, weight_reg::squared_frobenius, false};
        case variant_kind::nskl:
            return {kernel_kind::non_stationary, true, weight_reg::squared_frobenius, false};
        case variant_kind::askl_variant:
            return {kernel_kind::non_stationary, true, weight_reg::trace_norm, true};
    }
    throw argument_error("variant::preset: unknown variant");
}

const char* variant_name(variant_kind kind) {
    switch (kind) {
        case variant_kind::sk: return "SK";
        case variant_kind::nsk: return "NSK";
        case variant_kind::skl: return "SKL";
        case variant_kind::nskl: return "NSKL";
        case variant_kind::askl_variant: return "ASKL";
    }
    throw argument_error("variant_name: unknown variant");
}

variant_kind variant_from_name(const std::string& name) {
    if (name == "SK") return variant_kind::sk;
    if (name == "NSK") return variant_kind::nsk;
    if (name == "SKL") return variant_kind::skl;
    if (name == "NSKL") return variant_kind::nskl;
    if (name == "ASKL") return variant_kind::askl_variant;
    throw argument_error("unknown variant name: " + name);
}

void validate(const train_config& config) {
    if (config.feature_count < 1) throw argument_error("config: feature_count must be >= 1");
    if (config.lambda1 < 0 || !std::isfinite(config.lambda1))
        throw argument_error("config: lambda1 must be nonnegative");
    if (config.lambda2 < 0 || !std::isfinite(config.lambda2))
        throw argument_error("config: lambda2 must be nonnegative");
    if (!(config.sigma > 0)) throw argument_error("config: sigma must be positive");
    if (!(config.eta > 0)) throw argument_error("config: eta must be positive");
    if (config.batch_size < 1) throw argument_error("config: batch_size must be >= 1");
    if (config.checkpoint_every < 1)
        throw argument_error("config: checkpoint_every must be >= 1");
}

std::vector<double> predict(const trained_model& model, std::span<const double> x) {
    std::vector<double> phi = feature_map(x, model.pack, model.mode());
    std::vector<double> f(model.w.cols(), 0.0);
    for (std::size_t j = 0; j < model.w.rows(); ++j) {
        double p = phi[j];
        if (p == 0.0) continue;
        for (std::size_t c = 0; c < model.w.cols(); ++c) f[c] += model.w(j, c) * p;
    }
    return f;
}

std::size_t predict_class(const trained_model& model, std::span<const double> x) {
    std::vector<double> f = predict(model, x);
    std::size_t best = 0;
    for (std::size_t c = 1; c < f.size(); ++c)
        if (f[c] > f[best]) best = c;
    return best;
}

double objective(const matrix& w, const frequency_pack& pack, const dataset& data,
                 const train_config& config) {
    if (data.size() == 0) throw argument_error("objective: empty dataset");
    variant v = variant::preset(config.kind);
    map_mode mode = variant_map_mode(v);
    loss_kind kind = loss_for(data.task);

    matrix features = feature_matrix(data.x, pack, mode);
    if (features.rows() != w.rows())
        throw argument_error("objective: W rows do not match feature dimension");

    double mean_loss = 0.0;
    std::vector<double> f(w.cols());
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::fill(f.begin(), f.end(), 0.0);
        for (std::size_t j = 0; j < w.rows(); ++j) {
            double p = features(j, i);
            if (p == 0.0) continue;
            for (std::size_t c = 0; c < w.cols(); ++c) f[c] += w(j, c) * p;
        }
        mean_loss += loss_value(kind, f, data.labels[i]);
    }
    mean_loss /= static_cast<double>(data.size());

    double reg_w = v.regularizer == weight_reg::trace_norm
                       ? config.lambda1 * nuclear_norm(w)
                       : config.lambda1 * frobenius_norm_sq(w);
    double reg_phi = 0.0;
    if (v.feature_regularizer)
        reg_phi = config.lambda2 * frobenius_norm_sq(features) /
                  static_cast<double>(data.size());
    return mean_loss + reg_w + reg_phi;
}

eval_metrics evaluate(const trained_model& model, const dataset& data) {
    if (data.task != model.task)
        throw argument_error("evaluate: dataset task does not match model task");
    if (data.dim() != model.pack.d())
        throw argument_error("evaluate: dataset dimension does not match model");

    eval_metrics out;
    out.task = model.task;
    out.count = data.size();
    if (model.task == task_kind::classification) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            std::size_t pred =
                predict_class(model, std::span<const double>(data.x.row(i), data.dim()));
            double predicted_value = model.class_values[pred];
            double true_value = data.class_values[data.labels[i].class_index()];
            if (predicted_value == true_value) ++hits;
        }
        out.value = static_cast<double>(hits) / static_cast<double>(data.size());
    } else {
        double sum_sq = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            std::vector<double> f =
                predict(model, std::span<const double>(data.x.row(i), data.dim()));
            const std::vector<double>& y = data.labels[i].target();
            if (y.size() != f.size())
                throw argument_error("evaluate: target length does not match outputs");
            for (std::size_t k = 0; k < f.size(); ++k) {
                double r = f[k] - y[k];
                sum_sq += r * r;
            }
        }
        out.value = std::sqrt(sum_sq / static_cast<double>(data.size()));
    }
    return out;
}

fit_result fit(const dataset& train, const train_config& config, const dataset* eval_set) {
    validate(config);
    if (train.size() == 0) throw argument_error("fit: empty dataset");
    variant v = variant::preset(config.kind);
    frequency_pack pack = init_frequencies(train.dim(), config.feature_count,
                                           1.0 / config.sigma, config.seed);
    if (v.kernel == kernel_kind::stationary) pack = tie_pack(std::move(pack));
    return fit_from_pack(train, config, std::move(pack), eval_set);
}

fit_result fit_from_pack(const dataset& train, const train_config& config,
                         frequency_pack pack, const dataset* eval_set) {
    validate(config);
    if (train.size() == 0) throw argument_error("fit: empty dataset");
    if (pack.d() != train.dim())
        throw argument_error("fit: pack dimension does not match dataset");
    if (config.batch_size > train.size())
        throw argument_error("fit: batch_size exceeds dataset size");
    std::size_t k = train.output_dim;
    if (train.task == task_kind::classification && k < 2)
        throw argument_error("fit: classification needs at least 2 classes");
    if (eval_set && eval_set->task != train.task)
        throw argument_error("fit: eval set task does not match");

    variant v = variant::preset(config.kind);
    map_mode mode = variant_map_mode(v);
    loss_kind kind = loss_for(train.task);
    std::size_t d = train.dim();
    std::size_t feat_dim = feature_dim(mode, config.feature_count);
    bool train_freq = v.train_frequencies && !config.freeze_frequencies;
    double lambda2 = v.feature_regularizer ? config.lambda2 : 0.0;

    matrix w(feat_dim, k);
    adam_state w_state = adam_state::for_parameter(feat_dim, k);
    adam_state omega_state = adam_state::for_parameter(d, config.feature_count);
    adam_state omega_prime_state = adam_state::for_parameter(d, config.feature_count);

    trained_model model;
    model.kind = config.kind;
    model.task = train.task;
    model.output_dim = k;
    model.class_values = train.class_values;
    model.standardization = train.standardization;

    trace_log trace;
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);
    std::int64_t iteration = 0;

    auto checkpoint = [&]() {
        trace_record rec;
        rec.iteration = iteration;
        rec.objective = objective(w, pack, train, config);
        if (eval_set) {
            model.w = w;
            model.pack = pack;
            rec.test_metric = evaluate(model, *eval_set).value;
        } else {
            rec.test_metric = std::numeric_limits<double>::quiet_NaN();
        }
        rec.nuclear_norm_w = nuclear_norm(w);
        rec.feature_frobenius_sq = frobenius_norm_sq(feature_matrix(train.x, pack, mode));
        trace.records.push_back(rec);
    };

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        rng shuffle_gen(derive_seed(config.seed, 0x7375660000000000ull + epoch));
        shuffle(order, shuffle_gen);
        for (std::size_t start = 0; start < train.size(); start += config.batch_size) {
            std::size_t stop = std::min(start + config.batch_size, train.size());
            batch b = batch_of(train, std::span<const std::size_t>(order).subspan(
                                          start, stop - start));
            ++iteration;

            // All gradients are taken at the current iterate before any
            // parameter moves.
            matrix features = feature_matrix(b.inputs, pack, mode);
            matrix gw = grad_w(b, w, features, kind);
            if (v.regularizer == weight_reg::squared_frobenius && config.lambda1 != 0.0)
                gw = add(gw, scale(w, 2.0 * config.lambda1));
            matrix g_omega, g_omega_prime;
            if (train_freq) {
                g_omega = grad_omega(b, w, pack, lambda2, freq_select::primary, kind, mode);
                if (mode == map_mode::non_stationary_cos)
                    g_omega_prime =
                        grad_omega(b, w, pack, lambda2, freq_select::prime, kind, mode);
            }

            if (config.optimizer == optimizer_kind::adam) {
                auto [w_next, s_next] = adam_step(w_state, w, gw, config.eta);
                w = std::move(w_next);
                w_state = std::move(s_next);
            } else {
                w = sgd_step(w, gw, config.eta);
            }
            if (v.regularizer == weight_reg::trace_norm && config.lambda1 != 0.0) {
                double pre = config.debug_checks ? nuclear_norm(w) : 0.0;
                w = svt_prox(w, config.lambda1 * config.eta);
                if (config.debug_checks) {
                    double post = nuclear_norm(w);
                    if (post > pre + 1e-9)
                        throw numeric_error(
                            "svt_prox increased the nuclear norm at iteration " +
                                std::to_string(iteration),
                            post - pre);
                }
            }

            if (train_freq) {
                if (config.optimizer == optimizer_kind::adam) {
                    auto [o_next, os_next] =
                        adam_step(omega_state, pack.omega, g_omega, config.eta);
                    pack.omega = std::move(o_next);
                    omega_state = std::move(os_next);
                } else {
                    pack.omega = sgd_step(pack.omega, g_omega, config.eta);
                }
                if (mode == map_mode::non_stationary_cos) {
                    if (config.optimizer == optimizer_kind::adam) {
                        auto [p_next, ps_next] = adam_step(omega_prime_state,
                                                           pack.omega_prime,
                                                           g_omega_prime, config.eta);
                        pack.omega_prime = std::move(p_next);
                        omega_prime_state = std::move(ps_next);
                    } else {
                        pack.omega_prime = sgd_step(pack.omega_prime, g_omega_prime,
                                                    config.eta);
                    }
                } else {
                    // Stationary learned variant: the pack stays tied.
                    pack.omega_prime = pack.omega;
                }
            }

            check_finite_params(w, pack, train_freq, iteration);
            if (iteration % static_cast<std::int64_t>(config.checkpoint_every) == 0)
                checkpoint();
        }
    }

    model.w = std::move(w);
    model.pack = std::move(pack);
    return {std::move(model), std::move(trace)};
}

}  // namespace askl
