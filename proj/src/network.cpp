#include "iforge/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "iforge/mask.hpp"
#include "iforge/rng.hpp"

namespace iforge {

namespace {

constexpr std::uint64_t kInitSalt = 0x696e6974ULL;     // weight initialization
constexpr std::uint64_t kShuffleSalt = 0x73687566ULL;  // epoch shuffling
constexpr std::uint64_t kMaskSalt = 0x6d61736bULL;     // per-step dropout masks

void check_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) throw std::runtime_error("numerical overflow");
}

// Retention multiplier for hidden unit j of hidden layer l.
inline double unit_multiplier(const Mask* mask, double scale, std::size_t l, std::size_t j) {
    if (mask == nullptr) return 1.0;
    return mask->keep[l][j] ? scale : 0.0;
}

inline double mask_scale(const Mask* mask) {
    if (mask == nullptr || !mask->scaled()) return 1.0;
    return 1.0 / mask->retain_prob;
}

void fisher_yates(std::vector<std::size_t>& order, Rng& rng) {
    for (std::size_t i = order.size(); i-- > 1;) {
        const std::size_t j = rng.uniform_index(i + 1);
        std::swap(order[i], order[j]);
    }
}

// Adds the gradient of out_weight * f(x; params) to `grad` using the trace of
// a forward pass. out_weight is d(objective)/d(prediction) for this sample.
void accumulate_sample_gradient(const NetworkSpec& spec, const Parameters& params,
                                std::span<const double> x, const ForwardTrace& trace,
                                double out_weight, const Mask* mask, Parameters& grad) {
    const int n_hidden = spec.hidden_layer_count();
    const double scale = mask_scale(mask);

    // Output layer.
    {
        Matrix& gw = grad.weights[n_hidden];
        const auto& h = trace.post[n_hidden - 1];
        for (std::size_t j = 0; j < h.size(); ++j) gw(0, j) += out_weight * h[j];
        grad.biases[n_hidden][0] += out_weight;
    }

    // delta = d(objective)/d(post-activation of hidden layer l).
    std::vector<double> delta(trace.post[n_hidden - 1].size());
    {
        const Matrix& w_out = params.weights[n_hidden];
        for (std::size_t j = 0; j < delta.size(); ++j) delta[j] = out_weight * w_out(0, j);
    }

    for (int l = n_hidden - 1; l >= 0; --l) {
        const auto& pre = trace.pre[l];
        const std::size_t width = pre.size();
        std::vector<double> dpre(width);
        for (std::size_t j = 0; j < width; ++j) {
            // post = mult * max(0, pre); subgradient at pre == 0 is 0.
            const double mult = unit_multiplier(mask, scale, static_cast<std::size_t>(l), j);
            dpre[j] = (pre[j] > 0.0) ? delta[j] * mult : 0.0;
        }

        Matrix& gw = grad.weights[l];
        auto& gb = grad.biases[l];
        const double* input = (l == 0) ? x.data() : trace.post[l - 1].data();
        const std::size_t input_size = (l == 0) ? x.size() : trace.post[l - 1].size();
        for (std::size_t j = 0; j < width; ++j) {
            if (dpre[j] == 0.0) continue;
            double* grow = gw.row(j);
            for (std::size_t k = 0; k < input_size; ++k) grow[k] += dpre[j] * input[k];
            gb[j] += dpre[j];
        }

        if (l > 0) {
            const Matrix& w = params.weights[l];
            std::vector<double> next(trace.post[l - 1].size(), 0.0);
            for (std::size_t j = 0; j < width; ++j) {
                if (dpre[j] == 0.0) continue;
                const double* wrow = w.row(j);
                for (std::size_t k = 0; k < next.size(); ++k) next[k] += dpre[j] * wrow[k];
            }
            delta = std::move(next);
        }
    }
}

Parameters backward_indexed(const NetworkSpec& spec, const Parameters& params, const Matrix& X,
                            std::span<const double> y, std::span<const std::size_t> rows,
                            const Mask* mask) {
    if (rows.empty()) throw std::invalid_argument("backward: empty batch");

    // Accumulate in a canonical content order so the batch gradient is
    // exactly invariant to any permutation of the batch.
    std::vector<std::size_t> ordered(rows.begin(), rows.end());
    std::stable_sort(ordered.begin(), ordered.end(), [&](std::size_t a, std::size_t b) {
        const double* ra = X.row(a);
        const double* rb = X.row(b);
        for (std::size_t j = 0; j < X.cols(); ++j) {
            if (ra[j] < rb[j]) return true;
            if (ra[j] > rb[j]) return false;
        }
        return y[a] < y[b];
    });

    Parameters grad = Parameters::zeros(spec);
    const double inv_batch = 1.0 / static_cast<double>(ordered.size());
    for (std::size_t r : ordered) {
        const auto x = X.row_span(r);
        const ForwardTrace trace = forward(spec, params, x, mask);
        const double out_weight = 2.0 * (trace.prediction - y[r]) * inv_batch;
        accumulate_sample_gradient(spec, params, x, trace, out_weight, mask, grad);
    }
    return grad;
}

}  // namespace

int NetworkSpec::total_hidden() const {
    return std::accumulate(hidden_widths.begin(), hidden_widths.end(), 0);
}

std::vector<int> NetworkSpec::layer_widths() const {
    std::vector<int> w;
    w.reserve(hidden_widths.size() + 2);
    w.push_back(input_dim);
    w.insert(w.end(), hidden_widths.begin(), hidden_widths.end());
    w.push_back(output_dim);
    return w;
}

void NetworkSpec::validate() const {
    if (input_dim < 1) throw std::invalid_argument("NetworkSpec: input_dim must be positive");
    if (hidden_widths.empty())
        throw std::invalid_argument("NetworkSpec: at least one hidden layer required");
    for (int w : hidden_widths)
        if (w < 1) throw std::invalid_argument("NetworkSpec: hidden widths must be positive");
    if (output_dim != 1) throw std::invalid_argument("NetworkSpec: output_dim must be 1");
}

Parameters Parameters::zeros(const NetworkSpec& spec) {
    spec.validate();
    const auto widths = spec.layer_widths();
    Parameters p;
    p.weights.reserve(widths.size() - 1);
    p.biases.reserve(widths.size() - 1);
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        p.weights.emplace_back(static_cast<std::size_t>(widths[l + 1]),
                               static_cast<std::size_t>(widths[l]), 0.0);
        p.biases.emplace_back(static_cast<std::size_t>(widths[l + 1]), 0.0);
    }
    return p;
}

std::size_t Parameters::count() const {
    std::size_t n = 0;
    for (const auto& w : weights) n += w.rows() * w.cols();
    for (const auto& b : biases) n += b.size();
    return n;
}

bool Parameters::all_finite() const {
    for (const auto& w : weights)
        for (double v : w.data())
            if (!std::isfinite(v)) return false;
    for (const auto& b : biases)
        for (double v : b)
            if (!std::isfinite(v)) return false;
    return true;
}

bool Parameters::same_shape(const Parameters& other) const {
    if (weights.size() != other.weights.size() || biases.size() != other.biases.size())
        return false;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        if (weights[l].rows() != other.weights[l].rows() ||
            weights[l].cols() != other.weights[l].cols())
            return false;
        if (biases[l].size() != other.biases[l].size()) return false;
    }
    return true;
}

std::size_t parameter_count(const NetworkSpec& spec) {
    return Parameters::zeros(spec).count();
}

Parameters init_network(const NetworkSpec& spec, std::uint64_t seed) {
    Parameters p = Parameters::zeros(spec);
    Rng rng(seed);
    for (auto& w : p.weights) {
        const double fan_in = static_cast<double>(w.cols());
        const double fan_out = static_cast<double>(w.rows());
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        for (double& v : w.data()) v = rng.uniform(-bound, bound);
    }
    return p;
}

ForwardTrace forward(const NetworkSpec& spec, const Parameters& params,
                     std::span<const double> x, const Mask* mask) {
    if (x.size() != static_cast<std::size_t>(spec.input_dim))
        throw std::invalid_argument("forward: input dimension mismatch");
    if (mask != nullptr && !mask->shaped_for(spec))
        throw std::invalid_argument("forward: mask shape mismatch");
    check_finite(x);

    const int n_hidden = spec.hidden_layer_count();
    const double scale = mask_scale(mask);

    ForwardTrace trace;
    trace.pre.resize(n_hidden);
    trace.post.resize(n_hidden);

    std::vector<double> cur(x.begin(), x.end());
    for (int l = 0; l < n_hidden; ++l) {
        const Matrix& w = params.weights[l];
        const auto& b = params.biases[l];
        std::vector<double> pre(w.rows());
        for (std::size_t j = 0; j < w.rows(); ++j) {
            const double* wrow = w.row(j);
            double acc = b[j];
            for (std::size_t k = 0; k < cur.size(); ++k) acc += wrow[k] * cur[k];
            pre[j] = acc;
        }
        check_finite(pre);
        std::vector<double> post(w.rows());
        for (std::size_t j = 0; j < w.rows(); ++j) {
            const double mult = unit_multiplier(mask, scale, static_cast<std::size_t>(l), j);
            post[j] = mult * std::max(0.0, pre[j]);
        }
        trace.pre[l] = std::move(pre);
        trace.post[l] = post;
        cur = std::move(post);
    }

    const Matrix& w_out = params.weights[n_hidden];
    double out = params.biases[n_hidden][0];
    for (std::size_t k = 0; k < cur.size(); ++k) out += w_out(0, k) * cur[k];
    if (!std::isfinite(out)) throw std::runtime_error("numerical overflow");
    trace.prediction = out;
    return trace;
}

double predict(const NetworkSpec& spec, const Parameters& params, std::span<const double> x) {
    return forward(spec, params, x).prediction;
}

Parameters backward(const NetworkSpec& spec, const Parameters& params, const Matrix& X,
                    std::span<const double> y, const Mask* mask) {
    if (X.rows() != y.size()) throw std::invalid_argument("backward: X/y length mismatch");
    std::vector<std::size_t> rows(X.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return backward_indexed(spec, params, X, y, rows, mask);
}

OptimizerState OptimizerState::init(const NetworkSpec& spec, double learning_rate) {
    if (!(learning_rate > 0.0))
        throw std::invalid_argument("OptimizerState: learning rate must be positive");
    OptimizerState st;
    st.first_moment = Parameters::zeros(spec);
    st.second_moment = Parameters::zeros(spec);
    st.learning_rate = learning_rate;
    return st;
}

void OptimizerState::validate_shapes(const Parameters& params) const {
    if (!first_moment.same_shape(params) || !second_moment.same_shape(params))
        throw std::invalid_argument("OptimizerState: accumulator shapes do not match parameters");
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0))
        throw std::invalid_argument("OptimizerState: decay rates must lie in [0, 1)");
    if (!(epsilon > 0.0)) throw std::invalid_argument("OptimizerState: epsilon must be positive");
}

void adam_step(Parameters& params, const Parameters& grads, OptimizerState& state) {
    if (!params.same_shape(grads))
        throw std::invalid_argument("adam_step: gradient shape mismatch");
    state.validate_shapes(params);

    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

    auto update = [&](double& p, double g, double& m, double& v) {
        m = state.beta1 * m + (1.0 - state.beta1) * g;
        v = state.beta2 * v + (1.0 - state.beta2) * g * g;
        const double m_hat = m / bc1;
        const double v_hat = v / bc2;
        p -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    };

    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        auto& pw = params.weights[l].data();
        const auto& gw = grads.weights[l].data();
        auto& mw = state.first_moment.weights[l].data();
        auto& vw = state.second_moment.weights[l].data();
        for (std::size_t i = 0; i < pw.size(); ++i) update(pw[i], gw[i], mw[i], vw[i]);

        auto& pb = params.biases[l];
        const auto& gb = grads.biases[l];
        auto& mb = state.first_moment.biases[l];
        auto& vb = state.second_moment.biases[l];
        for (std::size_t i = 0; i < pb.size(); ++i) update(pb[i], gb[i], mb[i], vb[i]);
    }

    if (!params.all_finite()) throw std::runtime_error("adam_step: non-finite parameter update");
}

Parameters train(const NetworkSpec& spec, const Matrix& X, std::span<const double> y,
                 const TrainConfig& config, MaskMode mode, const Mask* fixed_mask,
                 double dropout_p) {
    spec.validate();
    const std::size_t n = X.rows();
    if (n == 0) throw std::invalid_argument("train: empty dataset");
    if (y.size() != n) throw std::invalid_argument("train: X/y length mismatch");
    if (X.cols() != static_cast<std::size_t>(spec.input_dim))
        throw std::invalid_argument("train: feature dimension mismatch");
    if (config.epochs < 1) throw std::invalid_argument("train: epochs must be positive");
    if (config.batch_size < 1 || static_cast<std::size_t>(config.batch_size) > n)
        throw std::invalid_argument("train: batch_size must be in [1, n]");
    if ((mode == MaskMode::fixed) != (fixed_mask != nullptr))
        throw std::invalid_argument("train: a mask is required iff mask mode is fixed");
    if (mode == MaskMode::fixed && !fixed_mask->shaped_for(spec))
        throw std::invalid_argument("train: mask shape mismatch");
    if (mode == MaskMode::per_step_dropout && !(dropout_p > 0.0 && dropout_p <= 1.0))
        throw std::invalid_argument("train: dropout probability must be in (0, 1]");

    Parameters params = init_network(spec, derive_seed(config.seed, kInitSalt));
    OptimizerState state = OptimizerState::init(spec, config.learning_rate);
    Rng shuffle_rng(derive_seed(config.seed, kShuffleSalt));
    const std::uint64_t mask_stream = derive_seed(config.seed, kMaskSalt);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::uint64_t batch_counter = 0;

    const auto batch_size = static_cast<std::size_t>(config.batch_size);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        if (config.shuffle) fisher_yates(order, shuffle_rng);
        for (std::size_t start = 0; start < n; start += batch_size) {
            const std::size_t end = std::min(start + batch_size, n);
            Mask step_mask;
            const Mask* mask = nullptr;
            if (mode == MaskMode::per_step_dropout) {
                step_mask = sample_mask(spec, dropout_p, derive_seed(mask_stream, batch_counter),
                                        MaskKind::per_step);
                mask = &step_mask;
            } else if (mode == MaskMode::fixed) {
                mask = fixed_mask;
            }
            const Parameters grads = backward_indexed(
                spec, params, X, y, std::span<const std::size_t>(order).subspan(start, end - start),
                mask);
            adam_step(params, grads, state);
            ++batch_counter;
        }
    }
    return params;
}

bool is_collapsed(const NetworkSpec& spec, const Parameters& params, const Matrix& X,
                  const Mask* mask) {
    if (X.rows() == 0) return false;
    const double first = forward(spec, params, X.row_span(0), mask).prediction;
    for (std::size_t i = 1; i < X.rows(); ++i)
        if (forward(spec, params, X.row_span(i), mask).prediction != first) return false;
    return true;
}

Parameters train_with_restarts(const NetworkSpec& spec, const Matrix& X,
                               std::span<const double> y, const TrainConfig& config,
                               MaskMode mode, const Mask* fixed_mask, double dropout_p,
                               int max_restarts) {
    constexpr std::uint64_t kRestartSalt = 0x72737472ULL;
    TrainConfig attempt_config = config;
    Parameters params;
    for (int attempt = 0;; ++attempt) {
        params = train(spec, X, y, attempt_config, mode, fixed_mask, dropout_p);
        // Per-step masks vary during training; collapse is a property of the
        // deterministic network, so check against the fixed mask only.
        const Mask* check_mask = (mode == MaskMode::fixed) ? fixed_mask : nullptr;
        if (!is_collapsed(spec, params, X, check_mask) || attempt >= max_restarts) break;
        attempt_config.seed =
            derive_seed(config.seed, kRestartSalt + static_cast<std::uint64_t>(attempt));
    }
    return params;
}

std::vector<double> jacobian(const NetworkSpec& spec, const Parameters& params,
                             std::span<const double> x) {
    const ForwardTrace trace = forward(spec, params, x);
    Parameters grad = Parameters::zeros(spec);
    accumulate_sample_gradient(spec, params, x, trace, 1.0, nullptr, grad);

    std::vector<double> flat;
    flat.reserve(grad.count());
    for (std::size_t l = 0; l < grad.weights.size(); ++l) {
        const auto& w = grad.weights[l].data();
        flat.insert(flat.end(), w.begin(), w.end());
        flat.insert(flat.end(), grad.biases[l].begin(), grad.biases[l].end());
    }
    return flat;
}

}  // namespace iforge
