#pragma once

// CSV and SVG emission for experiment results.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <span>
#include <string>

#include "cdpu/error.hpp"
#include "cdpu/experiment.hpp"

namespace cdpu {

/// Fixed-point text with at least 10 decimals and at least 10 significant
/// digits. Locale independent.
inline std::string format_decimal(double v) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  const double mag = std::abs(v);
  if (mag != 0.0 && mag < 1e-10) {
    out << std::scientific << std::setprecision(9) << v;
    return out.str();
  }
  int decimals = 10;
  if (mag != 0.0) decimals = std::max(10, 9 - static_cast<int>(std::floor(std::log10(mag))));
  out << std::fixed << std::setprecision(decimals) << v;
  return out.str();
}

/// `round,agent,mean_reward,cum_mean_reward`, round-major, agents in the
/// given order, LF line endings.
inline void write_csv(std::span<const RoundSeries> series, std::ostream& out) {
  out << "round,agent,mean_reward,cum_mean_reward\n";
  if (series.empty()) return;
  const auto rounds = series.front().mean.size();
  for (const auto& s : series)
    if (s.mean.size() != rounds || s.cumulative_mean.size() != rounds)
      throw Error(Errc::length_mismatch, "series '" + s.agent + "' has a different length");
  for (std::size_t t = 0; t < rounds; ++t)
    for (const auto& s : series)
      out << (t + 1) << ',' << s.agent << ',' << format_decimal(s.mean[t]) << ',' << format_decimal(s.cumulative_mean[t])
          << '\n';
}

namespace detail {

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& write) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot open " + path.string() + " for writing");
  write(out);
  out.flush();
  if (!out) throw Error(Errc::io_error, "write failed for " + path.string());
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

inline void write_csv(std::span<const RoundSeries> series, const std::filesystem::path& path) {
  detail::write_file(path, [&](std::ostream& out) { write_csv(series, out); });
}

/// Every record of every replication: `replication,round,agent,action,reward`.
inline void write_trial_log_csv(const TrialLog& log, std::ostream& out) {
  out << "replication,round,agent,action,reward\n";
  for (std::size_t r = 0; r < log.replications(); ++r)
    for (std::size_t t = 0; t < log.rounds(); ++t)
      for (std::size_t a = 0; a < log.agents().size(); ++a) {
        const auto& rec = log.at(r, a, t);
        out << (r + 1) << ',' << rec.round << ',' << log.agents()[a] << ',' << log.action_labels().at(rec.action) << ','
            << format_decimal(rec.reward) << '\n';
      }
}

inline void write_trial_log_csv(const TrialLog& log, const std::filesystem::path& path) {
  detail::write_file(path, [&](std::ostream& out) { write_trial_log_csv(log, out); });
}

/// Line chart of per-round mean reward, one polyline per agent.
inline void write_svg(std::span<const RoundSeries> series, std::ostream& out) {
  if (series.empty()) throw Error(Errc::usage, "nothing to plot: the series set is empty");
  const auto rounds = series.front().mean.size();
  if (rounds == 0) throw Error(Errc::usage, "nothing to plot: series are empty");

  double lo = 0.0, hi = 1.0;
  for (const auto& s : series)
    for (double v : s.mean) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }

  constexpr double width = 800, height = 480, left = 70, right = 170, top = 40, bottom = 60;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  auto x_of = [&](std::size_t t) {
    return rounds == 1 ? left + plot_w / 2 : left + plot_w * static_cast<double>(t) / static_cast<double>(rounds - 1);
  };
  auto y_of = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };
  auto num = [](double v) {
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s << std::fixed << std::setprecision(2) << v;
    return s.str();
  };
  static constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"};

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\" viewBox=\"0 0 "
      << width << ' ' << height << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"16\">Average reward per round</text>\n";

  // axes and ticks
  out << "<g stroke=\"black\" stroke-width=\"1\">\n";
  out << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + plot_h) << "\" x2=\"" << num(left + plot_w) << "\" y2=\""
      << num(top + plot_h) << "\"/>\n";
  out << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left) << "\" y2=\"" << num(top + plot_h)
      << "\"/>\n";
  out << "</g>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    out << "<text x=\"" << num(left - 6) << "\" y=\"" << num(y_of(v) + 4) << "\" text-anchor=\"end\">" << num(v)
        << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const auto t = rounds == 1 ? 0 : static_cast<std::size_t>(std::llround((rounds - 1) * k / 4.0));
    out << "<text x=\"" << num(x_of(t)) << "\" y=\"" << num(top + plot_h + 16) << "\" text-anchor=\"middle\">" << (t + 1)
        << "</text>\n";
  }
  out << "</g>\n";
  out << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"" << num(height - 16)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">round</text>\n";
  out << "<text x=\"18\" y=\"" << num(top + plot_h / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"13\" transform=\"rotate(-90 18 " << num(top + plot_h / 2) << ")\">mean reward</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    if (s.mean.size() != rounds) throw Error(Errc::length_mismatch, "series '" + s.agent + "' has a different length");
    const char* color = palette[i % std::size(palette)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" data-agent=\""
        << detail::xml_escape(s.agent) << "\" points=\"";
    for (std::size_t t = 0; t < rounds; ++t) out << (t ? " " : "") << num(x_of(t)) << ',' << num(y_of(s.mean[t]));
    out << "\"/>\n";
  }

  out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = top + 10 + 20.0 * static_cast<double>(i);
    const double x = left + plot_w + 16;
    out << "<line x1=\"" << num(x) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x + 24) << "\" y2=\"" << num(y)
        << "\" stroke=\"" << palette[i % std::size(palette)] << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << num(x + 30) << "\" y=\"" << num(y + 4) << "\">" << detail::xml_escape(series[i].agent)
        << "</text>\n";
  }
  out << "</g>\n</svg>\n";
}

inline void write_svg(std::span<const RoundSeries> series, const std::filesystem::path& path) {
  if (series.empty()) throw Error(Errc::usage, "nothing to plot: the series set is empty");
  detail::write_file(path, [&](std::ostream& out) { write_svg(series, out); });
}

}  // namespace cdpu
