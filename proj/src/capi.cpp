#include "advhopf/advhopf.h"

#include <algorithm>
#include <cstring>
#include <string>

#include "advhopf/commands.hpp"
#include "advhopf/error.hpp"
#include "advhopf/normal_form.hpp"
#include "advhopf/scenario.hpp"
#include "advhopf/spectral.hpp"
#include "advhopf/stability.hpp"

struct advhopf_scenario {
  advhopf::Scenario s;
};

namespace {

thread_local std::string g_last_error;

advhopf_status fail(advhopf_status st, const std::string& msg) {
  g_last_error = msg;
  return st;
}

template <class F>
advhopf_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return ADVHOPF_OK;
  } catch (const advhopf::Error& e) {
    return fail(advhopf::is_numerical(e.code()) ? ADVHOPF_NUMERICAL_ERROR : ADVHOPF_CONFIG_ERROR, e.what());
  } catch (const std::exception& e) {
    return fail(ADVHOPF_NUMERICAL_ERROR, e.what());
  }
}

advhopf_status copy_out(const std::string& text, char* buf, size_t len) {
  if (buf == nullptr || len <= text.size()) return fail(ADVHOPF_CONFIG_ERROR, "output buffer too small");
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return ADVHOPF_OK;
}

}  // namespace

extern "C" {

const char* advhopf_version(void) { return advhopf::kVersion; }

const char* advhopf_last_error(void) { return g_last_error.c_str(); }

advhopf_status advhopf_scenario_load(const char* path, advhopf_scenario** out) {
  if (path == nullptr || out == nullptr) return fail(ADVHOPF_CONFIG_ERROR, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new advhopf_scenario{advhopf::load_scenario(path)}; });
}

advhopf_status advhopf_scenario_parse(const char* text, advhopf_scenario** out) {
  if (text == nullptr || out == nullptr) return fail(ADVHOPF_CONFIG_ERROR, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new advhopf_scenario{advhopf::parse_scenario(text)}; });
}

void advhopf_scenario_free(advhopf_scenario* s) { delete s; }

advhopf_status advhopf_scenario_set(advhopf_scenario* s, const char* key, const char* value) {
  if (s == nullptr || key == nullptr || value == nullptr) return fail(ADVHOPF_CONFIG_ERROR, "null argument");
  // keep the handle unchanged when the override is rejected
  advhopf::Scenario copy = s->s;
  return guarded([&] {
    advhopf::set_entry(copy, key, value);
    s->s = std::move(copy);
  });
}

advhopf_status advhopf_scenario_hash(const advhopf_scenario* s, char* buf, size_t len) {
  if (s == nullptr) return fail(ADVHOPF_CONFIG_ERROR, "null scenario");
  std::string h;
  const advhopf_status st = guarded([&] { h = advhopf::scenario_hash(s->s); });
  return st == ADVHOPF_OK ? copy_out(h, buf, len) : st;
}

advhopf_status advhopf_scenario_out_dir(const advhopf_scenario* s, char* buf, size_t len) {
  if (s == nullptr) return fail(ADVHOPF_CONFIG_ERROR, "null scenario");
  return copy_out(s->s.out_dir, buf, len);
}

advhopf_status advhopf_run(const advhopf_scenario* s, const char* command, const char* out_dir, char* summary,
                           size_t summary_len, int* warnings) {
  if (s == nullptr || command == nullptr) return fail(ADVHOPF_CONFIG_ERROR, "null argument");
  advhopf::CommandReport report;
  const advhopf_status st = guarded([&] {
    report = advhopf::run_command(s->s, command, out_dir != nullptr ? out_dir : s->s.out_dir);
  });
  if (st != ADVHOPF_OK) return st;
  if (warnings != nullptr) *warnings = static_cast<int>(report.warnings.size());
  if (summary != nullptr && summary_len > 0) {
    const std::size_t n = std::min(report.summary.size(), summary_len - 1);
    std::memcpy(summary, report.summary.data(), n);
    summary[n] = '\0';
  }
  return ADVHOPF_OK;
}

advhopf_status advhopf_steady_state(const advhopf_scenario* s, double* u, double* v) {
  if (s == nullptr || u == nullptr || v == nullptr) return fail(ADVHOPF_CONFIG_ERROR, "null argument");
  return guarded([&] {
    const auto st = advhopf::steady_state(s->s.params);
    *u = st.u;
    *v = st.v;
  });
}

advhopf_status advhopf_critical_delay(const advhopf_scenario* s, int* n, double* omega, double* tau) {
  if (s == nullptr || n == nullptr || omega == nullptr || tau == nullptr) {
    return fail(ADVHOPF_CONFIG_ERROR, "null argument");
  }
  return guarded([&] {
    const auto a = advhopf::analyze(s->s.params, s->s.stability.n_modes, 0);
    const auto hp = advhopf::first_hopf_point(a);
    if (!hp) throw advhopf::Error(advhopf::ErrorCode::NoConvergence, "no Hopf point among the scanned modes");
    *n = hp->n;
    *omega = hp->omega;
    *tau = hp->tau;
  });
}

advhopf_status advhopf_eigenvalues(const advhopf_scenario* s, int count, double* nu) {
  if (s == nullptr || nu == nullptr || count < 1) return fail(ADVHOPF_CONFIG_ERROR, "invalid argument");
  return guarded([&] {
    const auto modes = advhopf::modes_for(count, s->s.params);
    for (int i = 0; i < count; ++i) nu[i] = modes[i].nu;
  });
}

advhopf_status advhopf_hopf_classification(const advhopf_scenario* s, double* gamma2, double* gamma3) {
  if (s == nullptr || gamma2 == nullptr || gamma3 == nullptr) return fail(ADVHOPF_CONFIG_ERROR, "null argument");
  return guarded([&] {
    advhopf::NormalFormOptions opt;
    opt.n_modes = s->s.stability.n_modes;
    opt.n_series = s->s.series;
    opt.convergence_check = false;
    const auto r = advhopf::compute_normal_form(s->s.params, opt);
    *gamma2 = r.classification.Gamma2;
    *gamma3 = r.classification.Gamma3;
  });
}

}  // extern "C"
