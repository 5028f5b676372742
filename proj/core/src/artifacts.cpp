#include "cogur/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cogur {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw resource_error("cannot write " + path);
  f << content;
}

std::vector<double> channel_series(const Trajectory& traj, const std::string& channel) {
  std::vector<double> out;
  out.reserve(traj.rows.size());
  for (const auto& r : traj.rows) {
    if (channel == "energy_X2") out.push_back(r.energy_x2);
    else if (channel == "energy_M1") out.push_back(r.energy_m1);
    else if (channel == "dissipation") out.push_back(r.dissipation);
    else if (channel == "V1_norm") out.push_back(std::sqrt(std::max(0.0, r.v1_norm2)));
    else throw config_error("unknown channel '" + channel + "'");
  }
  return out;
}

std::string trajectory_csv(const Trajectory& traj,
                           const std::vector<std::string>& channels,
                           bool with_modal) {
  std::ostringstream os;
  os << "t";
  for (const auto& c : channels) os << "," << c;
  const int nm = traj.modal_rows ? static_cast<int>(traj.modal_rows->cols()) : 0;
  if (with_modal)
    for (int i = 1; i <= nm; ++i) os << ",a_" << i;
  os << "\n";
  std::vector<std::vector<double>> cols;
  for (const auto& c : channels) cols.push_back(channel_series(traj, c));
  for (size_t k = 0; k < traj.rows.size(); ++k) {
    os << format_double(traj.rows[k].t);
    for (const auto& col : cols) os << "," << format_double(col[k]);
    if (with_modal)
      for (int i = 0; i < nm; ++i)
        os << "," << format_double((*traj.modal_rows)(static_cast<int>(k), i));
    os << "\n";
  }
  return os.str();
}

std::string eig_csv(const EigenBasis& basis) {
  std::ostringstream os;
  os << "index,lambda,residual\n";
  for (int k = 0; k < basis.n_modes; ++k)
    os << (k + 1) << "," << format_double(basis.lambda[k]) << ","
       << format_double(basis.residual[k]) << "\n";
  return os.str();
}

std::string study_csv(const ConvergenceReport& rep) {
  std::ostringstream os;
  os << "level,error,order\n";
  for (size_t i = 0; i < rep.error.size(); ++i) {
    os << format_double(rep.level_param[i]) << "," << format_double(rep.error[i]) << ",";
    if (i > 0) os << format_double(rep.order[i - 1]);
    os << "\n";
  }
  return os.str();
}

std::string limit_csv(const std::vector<LimitStudyRow>& rows) {
  std::ostringstream os;
  os << "epsilon,final_distance\n";
  for (const auto& r : rows)
    os << format_double(r.eps) << "," << format_double(r.final_distance) << "\n";
  return os.str();
}

namespace {

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string svg_line_plot(const std::vector<double>& t,
                          const std::vector<double>& y,
                          const std::string& channel) {
  if (t.empty() || t.size() != y.size())
    throw shape_error("svg_line_plot: empty or mismatched series");
  const double W = 640, H = 400, ml = 70, mr = 20, mt = 30, mb = 50;
  double t0 = t.front(), t1 = t.back();
  if (t1 <= t0) t1 = t0 + 1.0;
  double y0 = *std::min_element(y.begin(), y.end());
  double y1 = *std::max_element(y.begin(), y.end());
  if (y1 <= y0) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double tt) { return ml + (tt - t0) / (t1 - t0) * (W - ml - mr); };
  auto py = [&](double yy) { return H - mb - (yy - y0) / (y1 - y0) * (H - mt - mb); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
        "viewBox=\"0 0 640 400\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"640\" height=\"400\" fill=\"white\"/>\n";
  os << "<line x1=\"" << fmt6(ml) << "\" y1=\"" << fmt6(H - mb) << "\" x2=\""
     << fmt6(W - mr) << "\" y2=\"" << fmt6(H - mb)
     << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  os << "<line x1=\"" << fmt6(ml) << "\" y1=\"" << fmt6(mt) << "\" x2=\"" << fmt6(ml)
     << "\" y2=\"" << fmt6(H - mb) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double tt = t0 + (t1 - t0) * i / 5.0;
    const double yy = y0 + (y1 - y0) * i / 5.0;
    os << "<line x1=\"" << fmt6(px(tt)) << "\" y1=\"" << fmt6(H - mb) << "\" x2=\""
       << fmt6(px(tt)) << "\" y2=\"" << fmt6(H - mb + 5)
       << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << fmt6(px(tt)) << "\" y=\"" << fmt6(H - mb + 18)
       << "\" font-size=\"10\" text-anchor=\"middle\">" << fmt6(tt) << "</text>\n";
    os << "<line x1=\"" << fmt6(ml - 5) << "\" y1=\"" << fmt6(py(yy)) << "\" x2=\""
       << fmt6(ml) << "\" y2=\"" << fmt6(py(yy))
       << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << fmt6(ml - 8) << "\" y=\"" << fmt6(py(yy) + 3)
       << "\" font-size=\"10\" text-anchor=\"end\">" << fmt6(yy) << "</text>\n";
  }
  os << "<text x=\"" << fmt6((ml + W - mr) / 2) << "\" y=\"" << fmt6(H - 12)
     << "\" font-size=\"12\" text-anchor=\"middle\">t</text>\n";
  os << "<text x=\"" << fmt6((ml + W - mr) / 2) << "\" y=\"" << fmt6(mt - 10)
     << "\" font-size=\"12\" text-anchor=\"middle\">" << channel << "</text>\n";
  os << "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\" points=\"";
  for (size_t k = 0; k < t.size(); ++k)
    os << (k ? " " : "") << fmt6(px(t[k])) << "," << fmt6(py(y[k]));
  os << "\"/>\n</svg>\n";
  return os.str();
}

namespace {

using ojson = nlohmann::ordered_json;

ojson admissibility_j(const AdmissibilityReport& rep) {
  ojson j;
  j["miu1"] = rep.miu1;
  j["miu2"] = rep.miu2;
  j["miu3"] = rep.miu3;
  j["fading"] = rep.fading;
  if (rep.delta) j["delta"] = *rep.delta;
  else j["delta"] = nullptr;
  j["mu0"] = rep.mu0;
  return j;
}

ojson nonlin_j(const SignGrowthReport& sg, const BalanceReport& bal) {
  ojson j;
  j["M_f"] = sg.M_f;
  j["M_g"] = sg.M_g;
  j["ell1"] = sg.ell1;
  j["ell2"] = sg.ell2;
  j["r1"] = sg.r1;
  j["r2"] = sg.r2;
  j["sign_growth_pass"] = sg.pass;
  switch (bal.classification) {
    case NonlinearityClass::dissipative: j["classification"] = "dissipative"; break;
    case NonlinearityClass::balance_condition:
      j["classification"] = "balance-condition";
      break;
    case NonlinearityClass::sign_only: j["classification"] = "sign-only"; break;
  }
  j["balance_pass"] = bal.pass;
  if (bal.witness_eps) j["witness_eps"] = *bal.witness_eps;
  else j["witness_eps"] = nullptr;
  j["liminf_estimate"] = bal.liminf_estimate;
  j["reason"] = bal.reason;
  return j;
}

}  // namespace

std::string admissibility_json(const AdmissibilityReport& rep) {
  return admissibility_j(rep).dump(2) + "\n";
}

std::string nonlinearity_json(const SignGrowthReport& sg, const BalanceReport& bal) {
  return nonlin_j(sg, bal).dump(2) + "\n";
}

std::string manifest_json(const RunConfig& rc,
                          const AdmissibilityReport& kernel_omega,
                          const AdmissibilityReport& kernel_gamma,
                          const SignGrowthReport& sign_growth,
                          const BalanceReport& balance,
                          const std::vector<std::string>& outputs) {
  ojson j;
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(fnv1a64(rc.canonical())));
  j["config_hash"] = hash;
  j["tool_version"] = "cogur 0.1.0";
  j["validation"]["kernel_omega"] = admissibility_j(kernel_omega);
  j["validation"]["kernel_gamma"] = admissibility_j(kernel_gamma);
  j["validation"]["nonlinearity"] = nonlin_j(sign_growth, balance);
  j["outputs"] = outputs;
  return j.dump(2) + "\n";
}

}  // namespace cogur
