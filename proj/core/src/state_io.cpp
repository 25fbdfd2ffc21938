#include "qrelax/state_io.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "qrelax/basis.hpp"
#include "qrelax/errors.hpp"

namespace qrelax {

namespace {

using nlohmann::json;

json parse(std::istream& is) {
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("state file is not valid JSON: ") + e.what());
  }
}

double number_field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number())
    throw SchemaError(std::string("coefficient entry needs numeric field '") + key + "'");
  return it->get<double>();
}

int index_field(const json& j, const char* key, int m) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number_integer())
    throw SchemaError(std::string("coefficient entry needs integer field '") + key + "'");
  const int v = it->get<int>();
  if (v < 0 || v > m)
    throw SchemaError(std::string("coefficient index '") + key + "' out of range 0.." +
                      std::to_string(m));
  return v;
}

template <class State>
State load_coefficients(const json& j, const char* key_a, const char* key_b) {
  const int m = [&] {
    const auto it = j.find("m");
    if (it == j.end() || !it->is_number_integer() || it->get<int>() < 0)
      throw SchemaError("state file needs a shell cutoff field 'm' >= 0");
    return it->get<int>();
  }();

  const auto coeffs = j.find("coefficients");
  if (coeffs == j.end() || !coeffs->is_array())
    throw SchemaError("state file needs a 'coefficients' array");

  State state(m);
  std::vector<bool> seen(state.basis_count(), false);
  for (const json& entry : *coeffs) {
    if (!entry.is_object()) throw SchemaError("coefficient entries must be objects");
    const int a = index_field(entry, key_a, m);
    const int b = index_field(entry, key_b, m);
    if (a + b > m)
      throw SchemaError("coefficient (" + std::to_string(a) + ", " + std::to_string(b) +
                        ") lies above shell " + std::to_string(m));
    const int off = triangular_offset(a, b);
    if (seen[off])
      throw SchemaError("duplicate coefficient (" + std::to_string(a) + ", " +
                        std::to_string(b) + ")");
    seen[off] = true;
    state.c[off] = Complex(number_field(entry, "re"), number_field(entry, "im"));
  }
  return state;
}

template <class State>
void check_norm(State& state, bool renormalize) {
  const double n = state.norm_sq();
  if (std::abs(n - 1.0) <= 1e-9) return;
  if (!renormalize)
    throw NormalizationError("state norm^2 = " + std::to_string(n) +
                             " deviates from 1 by more than 1e-9 (use renormalize to accept)");
  if (n <= 0.0) throw NormalizationError("state has zero norm; cannot renormalize");
  state.normalize();
}

template <class State>
json dump_state(const State& state, const char* basis, const char* key_a, const char* key_b) {
  json coeffs = json::array();
  for (int s = 0; s <= state.m; ++s) {
    for (int a = 0; a <= s; ++a) {
      const Complex c = state.c[triangular_offset(a, s - a)];
      coeffs.push_back({{key_a, a}, {key_b, s - a}, {"re", c.real()}, {"im", c.imag()}});
    }
  }
  return {{"basis", basis}, {"m", state.m}, {"coefficients", std::move(coeffs)}};
}

}  // namespace

AnyState load_state(std::istream& is, bool renormalize) {
  const json j = parse(is);
  if (!j.is_object()) throw SchemaError("state file must be a JSON object");
  const auto basis = j.find("basis");
  if (basis == j.end() || !basis->is_string())
    throw SchemaError("state file needs a 'basis' field (\"angular\" or \"cartesian\")");

  if (*basis == "angular") {
    AngularState st = load_coefficients<AngularState>(j, "nd", "ng");
    check_norm(st, renormalize);
    return st;
  }
  if (*basis == "cartesian") {
    CartesianState st = load_coefficients<CartesianState>(j, "nx", "ny");
    check_norm(st, renormalize);
    return st;
  }
  throw SchemaError("unknown basis '" + basis->get<std::string>() + "'");
}

AnyState load_state_file(const std::string& path, bool renormalize) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open state file '" + path + "'");
  return load_state(in, renormalize);
}

AngularState load_angular_state_file(const std::string& path, bool renormalize) {
  AnyState any = load_state_file(path, renormalize);
  if (auto* ang = std::get_if<AngularState>(&any)) return std::move(*ang);
  return cartesian_to_angular(std::get<CartesianState>(any));
}

void save_state(const AngularState& state, std::ostream& os) {
  os << dump_state(state, "angular", "nd", "ng").dump(2) << '\n';
}

void save_state(const CartesianState& state, std::ostream& os) {
  os << dump_state(state, "cartesian", "nx", "ny").dump(2) << '\n';
}

namespace {

template <class State>
void save_to_file(const State& state, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot open '" + path + "' for writing");
  save_state(state, out);
}

}  // namespace

void save_state_file(const AngularState& state, const std::string& path) {
  save_to_file(state, path);
}

void save_state_file(const CartesianState& state, const std::string& path) {
  save_to_file(state, path);
}

}  // namespace qrelax
