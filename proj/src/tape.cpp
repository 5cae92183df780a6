#include "ecc/tape.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "ecc/errors.hpp"

namespace ecc {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

GradientTape::Node GradientTape::push(Entry e) {
  for (Node in : e.inputs) {
    if (in >= nodes_.size()) throw UsageError("tape node refers to an unknown input");
    e.requires_grad = e.requires_grad || nodes_[in].requires_grad;
  }
  nodes_.push_back(std::move(e));
  return nodes_.size() - 1;
}

GradientTape::Node GradientTape::last() const {
  if (nodes_.empty()) throw UsageError("empty gradient tape");
  return nodes_.size() - 1;
}

GradientTape::Node GradientTape::constant(Tensor value) {
  Entry e{Op::kConstant, std::move(value), {}};
  return push(std::move(e));
}

GradientTape::Node GradientTape::variable(Tensor value, std::string name) {
  Entry e{Op::kVariable, std::move(value), {}};
  e.requires_grad = true;
  e.name = std::move(name);
  return push(std::move(e));
}

Tensor linear_forward(const Tensor& xv, const Tensor& w, const Tensor& b) {
  if (xv.rank() != 2 || w.rank() != 2 || xv.cols() != w.shape()[1] || b.size() != w.shape()[0]) {
    throw UsageError("linear: incompatible shapes x" + shape_string(xv.shape()) + " W" +
                     shape_string(w.shape()) + " b" + shape_string(b.shape()));
  }
  const std::size_t batch = xv.rows(), in = w.shape()[1], out = w.shape()[0];
  Tensor y({batch, out});
  for (std::size_t r = 0; r < batch; ++r) {
    const double* xr = xv.data().data() + r * in;
    for (std::size_t o = 0; o < out; ++o) {
      const double* wo = w.data().data() + o * in;
      double acc = 0.0;
      for (std::size_t i = 0; i < in; ++i) acc += wo[i] * xr[i];
      y.at(r, o) = acc + b[o];
    }
  }
  return y;
}

Tensor relu_forward(Tensor x) {
  for (double& v : x.values()) v = v > 0.0 ? v : 0.0;
  return x;
}

GradientTape::Node GradientTape::linear(Node x, Node weight, Node bias) {
  Tensor y = linear_forward(value(x), value(weight), value(bias));
  return push(Entry{Op::kLinear, std::move(y), {x, weight, bias}});
}

GradientTape::Node GradientTape::relu(Node x) {
  return push(Entry{Op::kRelu, relu_forward(value(x)), {x}});
}

GradientTape::Node GradientTape::add(Node a, Node b) {
  if (value(a).shape() != value(b).shape()) throw UsageError("add: shape mismatch");
  Tensor y = value(a);
  const Tensor& bv = value(b);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += bv[i];
  return push(Entry{Op::kAdd, std::move(y), {a, b}});
}

GradientTape::Node GradientTape::scale(Node a, double factor) {
  Tensor y = value(a);
  for (double& v : y.values()) v *= factor;
  Entry e{Op::kScale, std::move(y), {a}};
  e.coeffs = {factor};
  return push(std::move(e));
}

GradientTape::Node GradientTape::dot(Node a, Node b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  if (av.shape() != bv.shape()) throw UsageError("dot: shape mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) acc += av[i] * bv[i];
  return push(Entry{Op::kDot, Tensor({1}, std::vector<double>{acc}), {a, b}});
}

GradientTape::Node GradientTape::weighted_sum(std::span<const Node> scalars, std::span<const double> weights) {
  if (scalars.size() != weights.size() || scalars.empty()) {
    throw UsageError("weighted_sum: need one weight per scalar");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    if (value(scalars[i]).size() != 1) throw UsageError("weighted_sum: inputs must be scalars");
    acc += weights[i] * value(scalars[i])[0];
  }
  Entry e{Op::kWeightedSum, Tensor({1}, std::vector<double>{acc}),
          std::vector<Node>(scalars.begin(), scalars.end())};
  e.coeffs.assign(weights.begin(), weights.end());
  return push(std::move(e));
}

GradientTape::Node GradientTape::softmax_cross_entropy(Node logits, std::vector<std::size_t> labels,
                                                       std::vector<char> include) {
  const Tensor& z = value(logits);
  if (z.rank() != 2 || labels.size() != z.rows() || include.size() != z.rows()) {
    throw UsageError("softmax_cross_entropy: logits must be (batch, classes) with one label per row");
  }
  const std::size_t batch = z.rows(), k = z.cols();
  Tensor probs({batch, k});
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t r = 0; r < batch; ++r) {
    auto zr = z.row(r);
    const double mx = *std::max_element(zr.begin(), zr.end());
    double denom = 0.0;
    for (std::size_t c = 0; c < k; ++c) denom += std::exp(zr[c] - mx);
    for (std::size_t c = 0; c < k; ++c) probs.at(r, c) = std::exp(zr[c] - mx) / denom;
    if (!include[r]) continue;
    if (labels[r] >= k) throw UsageError("softmax_cross_entropy: label out of range");
    const double p = std::clamp(probs.at(r, labels[r]), kProbEpsilon, 1.0 - kProbEpsilon);
    total -= std::log(p);
    ++count;
  }
  const double loss = count ? total / static_cast<double>(count) : 0.0;
  Entry e{Op::kSoftmaxCe, Tensor({1}, std::vector<double>{loss}), {logits}};
  e.labels = std::move(labels);
  e.include = std::move(include);
  e.cache = std::move(probs);
  return push(std::move(e));
}

GradientTape::Node GradientTape::sigmoid_bce(Node target, Node prediction) {
  const Tensor& t = value(target);
  const Tensor& a = value(prediction);
  if (t.shape() != a.shape()) throw UsageError("sigmoid_bce: shape mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double p = sigmoid(t[i]);
    const double q = std::clamp(sigmoid(a[i]), kProbEpsilon, 1.0 - kProbEpsilon);
    total -= p * std::log(q) + (1.0 - p) * std::log(1.0 - q);
  }
  return push(Entry{Op::kSigmoidBce, Tensor({1}, std::vector<double>{total / static_cast<double>(t.size())}),
                    {target, prediction}});
}

Gradients backward(const GradientTape& tape, double loss_adjoint) {
  return backward(tape, tape.last(), loss_adjoint);
}

Gradients backward(const GradientTape& tape, GradientTape::Node root, double loss_adjoint) {
  using Op = GradientTape::Op;
  const auto& nodes = tape.nodes_;
  if (root >= nodes.size()) throw UsageError("backward: unknown root node");
  if (nodes[root].value.size() != 1) {
    throw UsageError("backward: tape does not terminate in a scalar (root shape " +
                     shape_string(nodes[root].value.shape()) + ")");
  }

  std::vector<std::optional<Tensor>> adj(root + 1);
  auto accumulate = [&](GradientTape::Node n) -> Tensor& {
    if (!adj[n]) adj[n].emplace(nodes[n].value.shape());
    return *adj[n];
  };
  accumulate(root)[0] = loss_adjoint;

  Gradients grads;
  for (std::size_t idx = root + 1; idx-- > 0;) {
    const auto& e = nodes[idx];
    if (!adj[idx] || !e.requires_grad) continue;
    const Tensor& g = *adj[idx];
    switch (e.op) {
      case Op::kConstant:
        break;
      case Op::kVariable: {
        auto [it, inserted] = grads.try_emplace(e.name, g);
        if (!inserted) {
          for (std::size_t i = 0; i < g.size(); ++i) it->second[i] += g[i];
        }
        break;
      }
      case Op::kLinear: {
        const auto x = e.inputs[0], w = e.inputs[1], b = e.inputs[2];
        const Tensor& xv = nodes[x].value;
        const Tensor& wv = nodes[w].value;
        const std::size_t batch = xv.rows(), in = wv.shape()[1], out = wv.shape()[0];
        if (nodes[x].requires_grad) {
          Tensor& gx = accumulate(x);
          for (std::size_t r = 0; r < batch; ++r) {
            for (std::size_t o = 0; o < out; ++o) {
              const double go = g.at(r, o);
              if (go == 0.0) continue;
              const double* wo = wv.data().data() + o * in;
              double* gxr = gx.data().data() + r * in;
              for (std::size_t i = 0; i < in; ++i) gxr[i] += go * wo[i];
            }
          }
        }
        if (nodes[w].requires_grad) {
          Tensor& gw = accumulate(w);
          for (std::size_t r = 0; r < batch; ++r) {
            const double* xr = xv.data().data() + r * in;
            for (std::size_t o = 0; o < out; ++o) {
              const double go = g.at(r, o);
              if (go == 0.0) continue;
              double* gwo = gw.data().data() + o * in;
              for (std::size_t i = 0; i < in; ++i) gwo[i] += go * xr[i];
            }
          }
        }
        if (nodes[b].requires_grad) {
          Tensor& gb = accumulate(b);
          for (std::size_t r = 0; r < batch; ++r) {
            for (std::size_t o = 0; o < out; ++o) gb[o] += g.at(r, o);
          }
        }
        break;
      }
      case Op::kRelu: {
        const auto x = e.inputs[0];
        if (!nodes[x].requires_grad) break;
        Tensor& gx = accumulate(x);
        const Tensor& xv = nodes[x].value;
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (xv[i] > 0.0) gx[i] += g[i];
        }
        break;
      }
      case Op::kAdd:
        for (auto in : e.inputs) {
          if (!nodes[in].requires_grad) continue;
          Tensor& gi = accumulate(in);
          for (std::size_t i = 0; i < g.size(); ++i) gi[i] += g[i];
        }
        break;
      case Op::kScale: {
        const auto x = e.inputs[0];
        if (!nodes[x].requires_grad) break;
        Tensor& gx = accumulate(x);
        for (std::size_t i = 0; i < g.size(); ++i) gx[i] += e.coeffs[0] * g[i];
        break;
      }
      case Op::kDot: {
        const auto a = e.inputs[0], b = e.inputs[1];
        const double s = g[0];
        if (nodes[a].requires_grad) {
          Tensor& ga = accumulate(a);
          for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += s * nodes[b].value[i];
        }
        if (nodes[b].requires_grad) {
          Tensor& gb = accumulate(b);
          for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += s * nodes[a].value[i];
        }
        break;
      }
      case Op::kWeightedSum:
        for (std::size_t i = 0; i < e.inputs.size(); ++i) {
          if (!nodes[e.inputs[i]].requires_grad) continue;
          accumulate(e.inputs[i])[0] += e.coeffs[i] * g[0];
        }
        break;
      case Op::kSoftmaxCe: {
        const auto z = e.inputs[0];
        if (!nodes[z].requires_grad) break;
        std::size_t count = 0;
        for (char inc : e.include) count += inc ? 1 : 0;
        if (count == 0) break;
        Tensor& gz = accumulate(z);
        const Tensor& p = e.cache;
        const double s = g[0] / static_cast<double>(count);
        for (std::size_t r = 0; r < p.rows(); ++r) {
          if (!e.include[r]) continue;
          const double py = p.at(r, e.labels[r]);
          // Derivative of the clamp is zero outside its range.
          if (py < kProbEpsilon || py > 1.0 - kProbEpsilon) continue;
          for (std::size_t c = 0; c < p.cols(); ++c) {
            gz.at(r, c) += s * (p.at(r, c) - (c == e.labels[r] ? 1.0 : 0.0));
          }
        }
        break;
      }
      case Op::kSigmoidBce: {
        const auto t = e.inputs[0], a = e.inputs[1];
        const Tensor& tv = nodes[t].value;
        const Tensor& av = nodes[a].value;
        const double s = g[0] / static_cast<double>(tv.size());
        Tensor* gt = nodes[t].requires_grad ? &accumulate(t) : nullptr;
        Tensor* ga = nodes[a].requires_grad ? &accumulate(a) : nullptr;
        for (std::size_t i = 0; i < tv.size(); ++i) {
          const double p = sigmoid(tv[i]);
          const double q_raw = sigmoid(av[i]);
          const bool clamped = q_raw < kProbEpsilon || q_raw > 1.0 - kProbEpsilon;
          const double q = std::clamp(q_raw, kProbEpsilon, 1.0 - kProbEpsilon);
          if (ga && !clamped) (*ga)[i] += s * (q - p);
          if (gt) (*gt)[i] += s * -p * (1.0 - p) * (std::log(q) - std::log(1.0 - q));
        }
        break;
      }
    }
  }
  return grads;
}

}  // namespace ecc
