#include "ptwalk/trace_io.hpp"

#include "ptwalk/error.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

namespace ptwalk {

using nlohmann::json;

namespace {

std::vector<std::string_view>
split(std::string_view line, char sep = ',')
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos)
      break;
    start = pos + 1;
  }
  return out;
}

std::string_view
trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

bool
is_number(std::string_view s)
{
  s = trim(s);
  if (s.empty())
    return false;
  double v;
  const char* begin = s.data();
  if (*begin == '+')
    ++begin;
  auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size();
}

const char*
variant_name(PenaltyVariant v)
{
  return v == PenaltyVariant::rejection ? "rejection" : "gradient";
}

const char*
shape_name(PenaltyKind k)
{
  switch (k) {
    case PenaltyKind::flipped_gaussian:
      return "gaussian";
    case PenaltyKind::flipped_t:
      return "t";
    case PenaltyKind::flipped_rational:
      return "rational";
    case PenaltyKind::flipped_bump:
      return "bump";
  }
  return "t";
}

} // namespace

std::string
format_real(double v)
{
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double
parse_real(std::string_view s)
{
  s = trim(s);
  const char* begin = s.data();
  if (!s.empty() && *begin == '+')
    ++begin;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw DataError("not a number: '" + std::string(s) + "'");
  return v;
}

json
to_json(const KernelConfig& cfg)
{
  json j;
  j["base_move_probs"] = { { "walk", cfg.base_move_probs[0] },
                           { "traverse", cfg.base_move_probs[1] },
                           { "hop", cfg.base_move_probs[2] },
                           { "blow", cfg.base_move_probs[3] } };
  j["penalty_prob"] = cfg.penalty_prob;
  j["walk_param"] = cfg.walk_param;
  j["traverse_param"] = cfg.traverse_param;
  j["coord_update_target"] = cfg.coord_update_target;
  j["seed"] = cfg.seed;
  const auto& p = cfg.penalty;
  j["penalty"] = {
    { "variant", variant_name(p.variant) },
    { "shape", shape_name(p.shape.kind) },
    { "shape_df", p.shape.df },
    { "proposal", p.proposal.kind == ProposalKind::gaussian ? "gaussian" : "t" },
    { "proposal_df", p.proposal.df },
    { "kappa", p.kappa },
    { "max_trials", p.max_trials },
    { "scale_floor", scale_floor },
  };
  return j;
}

KernelConfig
kernel_config_from_json(const json& j)
{
  KernelConfig cfg;
  if (j.contains("base_move_probs")) {
    const auto& b = j["base_move_probs"];
    cfg.base_move_probs = { b.value("walk", cfg.base_move_probs[0]),
                            b.value("traverse", cfg.base_move_probs[1]),
                            b.value("hop", cfg.base_move_probs[2]),
                            b.value("blow", cfg.base_move_probs[3]) };
  }
  cfg.penalty_prob = j.value("penalty_prob", cfg.penalty_prob);
  cfg.walk_param = j.value("walk_param", cfg.walk_param);
  cfg.traverse_param = j.value("traverse_param", cfg.traverse_param);
  cfg.coord_update_target =
    j.value("coord_update_target", cfg.coord_update_target);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("penalty")) {
    const auto& p = j["penalty"];
    auto& pc = cfg.penalty;
    const std::string variant = p.value("variant", "rejection");
    if (variant == "rejection")
      pc.variant = PenaltyVariant::rejection;
    else if (variant == "gradient")
      pc.variant = PenaltyVariant::gradient;
    else
      throw ConfigError("penalty.variant: unknown value '" + variant + "'");
    const std::string shape = p.value("shape", "t");
    const double shape_df = p.value("shape_df", 2.0);
    if (shape == "gaussian")
      pc.shape = PenaltyShape::gaussian();
    else if (shape == "t")
      pc.shape = PenaltyShape::student_t(shape_df);
    else if (shape == "rational")
      pc.shape = PenaltyShape::rational();
    else if (shape == "bump")
      pc.shape = PenaltyShape::bump();
    else
      throw ConfigError("penalty.shape: unknown value '" + shape + "'");
    const std::string proposal = p.value("proposal", "t");
    const double proposal_df = p.value("proposal_df", 1.0);
    if (proposal == "gaussian")
      pc.proposal = ProposalFamily::gaussian();
    else if (proposal == "t")
      pc.proposal = ProposalFamily::student_t(proposal_df);
    else
      throw ConfigError("penalty.proposal: unknown value '" + proposal + "'");
    pc.kappa = p.value("kappa", pc.kappa);
    pc.max_trials = p.value("max_trials", pc.max_trials);
  }
  return cfg;
}

void
write_trace_csv(const std::filesystem::path& path, const Trace& trace)
{
  std::ofstream out(path);
  if (!out)
    throw DataError("cannot write '" + path.string() + "'");
  const auto d = trace.states.empty() ? 0 : trace.states.front().x.size();
  out << "iter,kind,accepted,log_gamma_x,log_gamma_y";
  for (Eigen::Index i = 0; i < d; ++i)
    out << ",x_" << i;
  for (Eigen::Index i = 0; i < d; ++i)
    out << ",y_" << i;
  out << '\n';
  for (std::size_t k = 0; k < trace.states.size(); ++k) {
    const auto it = trace.state_iters[k];
    const auto& s = trace.states[k];
    out << it << ',';
    if (it == 0)
      out << "init,1";
    else
      out << to_string(trace.records[it - 1].kind) << ','
          << (trace.records[it - 1].accepted ? 1 : 0);
    out << ',' << format_real(s.log_gamma_x) << ',' << format_real(s.log_gamma_y);
    for (Eigen::Index i = 0; i < d; ++i)
      out << ',' << format_real(s.x[i]);
    for (Eigen::Index i = 0; i < d; ++i)
      out << ',' << format_real(s.y[i]);
    out << '\n';
  }
  if (!out)
    throw DataError("write failure on '" + path.string() + "'");
}

json
trace_header(const Trace& trace)
{
  json j;
  j["target"] = trace.target_name;
  j["dim"] = trace.states.empty() ? 0 : trace.states.front().x.size();
  j["iters"] = trace.records.size();
  j["thin"] = trace.thin;
  j["seed"] = trace.config.seed;
  j["config"] = to_json(trace.config);
  json tally = json::object();
  for (MoveKind k : all_move_kinds) {
    const auto idx = static_cast<std::size_t>(k);
    tally[std::string(to_string(k))] = { { "proposed", trace.tally.proposed[idx] },
                                         { "accepted", trace.tally.accepted[idx] } };
  }
  j["tally"] = tally;
  return j;
}

void
write_json(const std::filesystem::path& path, const json& j)
{
  std::ofstream out(path);
  if (!out)
    throw DataError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

json
read_json(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot read '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("'" + path.string() + "': " + e.what());
  }
}

Trace
read_trace(const std::filesystem::path& csv, const std::filesystem::path& header)
{
  std::ifstream in(csv);
  if (!in)
    throw DataError("cannot read trace '" + csv.string() + "'");
  std::string line;
  if (!std::getline(in, line))
    throw DataError("trace '" + csv.string() + "' is empty");
  const auto cols = split(line);
  if (cols.size() < 7 || (cols.size() - 5) % 2 != 0 || trim(cols[0]) != "iter" ||
      trim(cols[1]) != "kind")
    throw DataError("trace '" + csv.string() + "': unexpected header");
  const auto d = static_cast<Eigen::Index>((cols.size() - 5) / 2);

  Trace trace;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty())
      continue;
    const auto f = split(line);
    if (f.size() != cols.size())
      throw DataError("trace '" + csv.string() + "' row " + std::to_string(row) +
                      ": expected " + std::to_string(cols.size()) + " fields");
    const auto it = static_cast<std::size_t>(parse_real(f[0]));
    PairState s{ Point(d), Point(d), parse_real(f[3]), parse_real(f[4]) };
    for (Eigen::Index i = 0; i < d; ++i) {
      s.x[i] = parse_real(f[5 + i]);
      s.y[i] = parse_real(f[5 + d + i]);
    }
    if (trim(f[1]) != "init") {
      MoveRecord r;
      r.iter = it;
      r.kind = move_kind_from_string(trim(f[1]));
      r.accepted = trim(f[2]) == "1";
      trace.records.push_back(r);
    }
    trace.states.push_back(std::move(s));
    trace.state_iters.push_back(it);
  }
  if (trace.states.empty())
    throw DataError("trace '" + csv.string() + "' has no rows");

  if (!header.empty()) {
    const json h = read_json(header);
    trace.target_name = h.value("target", "");
    trace.thin = h.value("thin", std::size_t{ 1 });
    if (h.contains("config"))
      trace.config = kernel_config_from_json(h["config"]);
    if (h.contains("tally"))
      for (MoveKind k : all_move_kinds) {
        const auto key = std::string(to_string(k));
        if (!h["tally"].contains(key))
          continue;
        const auto idx = static_cast<std::size_t>(k);
        trace.tally.proposed[idx] = h["tally"][key].value("proposed", std::size_t{ 0 });
        trace.tally.accepted[idx] = h["tally"][key].value("accepted", std::size_t{ 0 });
      }
  } else {
    for (const auto& r : trace.records)
      trace.tally.add(r);
  }
  return trace;
}

Eigen::MatrixXd
read_points(const std::filesystem::path& path, std::size_t burn_in)
{
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot read '" + path.string() + "'");
  std::string line;
  std::vector<std::vector<double>> rows;
  std::vector<int> x_cols;
  int iter_col = -1;
  bool first = true;
  std::size_t ncols = 0;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty())
      continue;
    const auto f = split(line);
    if (first) {
      first = false;
      ncols = f.size();
      const bool header = !is_number(f[0]);
      if (header) {
        for (std::size_t c = 0; c < f.size(); ++c) {
          const auto name = trim(f[c]);
          if (name == "iter")
            iter_col = static_cast<int>(c);
          if (name.starts_with("x_"))
            x_cols.push_back(static_cast<int>(c));
        }
        if (x_cols.empty()) // bare header without x_ names: all columns
          for (std::size_t c = 0; c < f.size(); ++c)
            x_cols.push_back(static_cast<int>(c));
        continue;
      }
      for (std::size_t c = 0; c < f.size(); ++c)
        x_cols.push_back(static_cast<int>(c));
    }
    if (f.size() != ncols)
      throw DataError("'" + path.string() + "' row " + std::to_string(row) +
                      ": expected " + std::to_string(ncols) + " fields");
    if (burn_in > 0 && iter_col >= 0 &&
        static_cast<std::size_t>(parse_real(f[iter_col])) <= burn_in)
      continue;
    std::vector<double> r;
    r.reserve(x_cols.size());
    for (int c : x_cols)
      r.push_back(parse_real(f[c]));
    rows.push_back(std::move(r));
  }
  if (rows.empty())
    throw DataError("'" + path.string() + "' contains no points");
  Eigen::MatrixXd m(rows.size(), x_cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < x_cols.size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

void
write_points(const std::filesystem::path& path, const Eigen::MatrixXd& points)
{
  std::ofstream out(path);
  if (!out)
    throw DataError("cannot write '" + path.string() + "'");
  for (Eigen::Index j = 0; j < points.cols(); ++j)
    out << (j ? "," : "") << "x_" << j;
  out << '\n';
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j)
      out << (j ? "," : "") << format_real(points(i, j));
    out << '\n';
  }
}

} // namespace ptwalk
