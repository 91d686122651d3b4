#include "herald/circuit/plan_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "herald/errors.hpp"

namespace herald::circuit {

namespace {

[[noreturn]] void bad(int line, const std::string& what) {
  throw ConfigError("line " + std::to_string(line) + ": " + what);
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_number(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used])))
      ++used;
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    bad(line, "cannot parse number '" + s + "'");
  }
}

int parse_int(const std::string& s, int line) {
  const double v = parse_number(s, line);
  const int i = static_cast<int>(std::lround(v));
  if (std::abs(v - i) > 1e-9) bad(line, "expected an integer, got '" + s + "'");
  return i;
}

// "1.39 e^{i2.50}" | "1.39e^i2.50" | "0.34" -> complex in polar form.
Complex parse_polar(const std::string& raw, int line) {
  const std::string s = trim(raw);
  const std::size_t at = s.find("e^");
  if (at == std::string::npos) return parse_number(s, line);
  const double mag = parse_number(trim(s.substr(0, at)), line);
  std::string ph = trim(s.substr(at + 2));
  if (!ph.empty() && ph.front() == '{') ph.erase(ph.begin());
  if (!ph.empty() && ph.back() == '}') ph.pop_back();
  ph = trim(ph);
  if (ph.empty() || (ph[0] != 'i' && ph[0] != 'I'))
    bad(line, "phase must look like e^{i...} in '" + raw + "'");
  ph.erase(ph.begin());
  return std::polar(mag, parse_number(trim(ph), line));
}

// "name_12 = value"  ->  {name, subscript digits, value}; subscript and value
// are optional ("0" stays whole).
struct Entry {
  std::string name;
  std::string subscript;
  std::string value;
  bool has_value = false;
};

Entry parse_entry(const std::string& raw) {
  Entry e;
  const std::size_t eq = raw.find('=');
  std::string head = trim(eq == std::string::npos ? raw : raw.substr(0, eq));
  if (eq != std::string::npos) {
    e.value = trim(raw.substr(eq + 1));
    e.has_value = true;
  }
  const std::size_t us = head.find('_');
  e.name = trim(us == std::string::npos ? head : head.substr(0, us));
  if (us != std::string::npos) e.subscript = trim(head.substr(us + 1));
  return e;
}

InputState parse_input_entry(const std::string& raw, int next_mode, int line) {
  InputState in;
  in.modes = {next_mode};
  const Entry e = parse_entry(raw);
  if (!e.has_value) {
    // Bare "0": the vacuum.
    if (e.name == "0") {
      in.kind = toolbox::StateKind::Fock;
      in.fock_n = 0;
      return in;
    }
    bad(line, "cannot read input state '" + raw + "'");
  }
  if (e.name == "n") {
    in.kind = toolbox::StateKind::Fock;
    in.fock_n = parse_int(e.value, line);
  } else if (e.name == "alpha") {
    in.kind = toolbox::StateKind::Coherent;
    in.amp = parse_polar(e.value, line);
  } else if (e.name == "zeta") {
    if (e.subscript.size() >= 2) {
      in.kind = toolbox::StateKind::TwoModeSqueezedVac;
      in.modes.push_back(next_mode + 1);
    } else {
      in.kind = toolbox::StateKind::SqueezedVac;
    }
    in.amp = parse_polar(e.value, line);
  } else {
    bad(line, "unknown input state '" + e.name + "'");
  }
  return in;
}

std::vector<int> parse_subscript_modes(const std::string& sub, int want,
                                       int line) {
  std::vector<int> modes;
  for (char c : sub) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      bad(line, "bad mode subscript '" + sub + "'");
    modes.push_back(c - '1');
  }
  if (static_cast<int>(modes.size()) != want)
    bad(line, "subscript '" + sub + "' names " + std::to_string(modes.size()) +
                  " mode(s), expected " + std::to_string(want));
  return modes;
}

PlanOp parse_op(const std::string& raw, int line) {
  PlanOp op;
  const std::string s = trim(raw);
  if (s == "I" || s == "1") {
    op.kind = toolbox::OpKind::Identity;
    op.modes = {0};
    return op;
  }
  const std::size_t open = s.find('(');
  if (open == std::string::npos || s.back() != ')')
    bad(line, "operator must look like D_1(...), got '" + raw + "'");
  const Entry head = parse_entry(s.substr(0, open));
  const std::string args = trim(s.substr(open + 1, s.size() - open - 2));
  const Entry arg = parse_entry(args);

  if (head.name == "D") {
    op.kind = toolbox::OpKind::Displacement;
    if (arg.has_value && arg.name != "alpha")
      bad(line, "displacement takes alpha = ...");
    op.amp = parse_polar(arg.has_value ? arg.value : args, line);
  } else if (head.name == "S") {
    op.kind = head.subscript.size() >= 2 ? toolbox::OpKind::TwoModeSqueeze
                                         : toolbox::OpKind::Squeeze;
    if (arg.has_value && arg.name != "zeta") bad(line, "squeeze takes zeta = ...");
    op.amp = parse_polar(arg.has_value ? arg.value : args, line);
  } else if (head.name == "U") {
    op.kind = toolbox::OpKind::BeamSplitter;
    if (arg.has_value && arg.name != "T")
      bad(line, "beam splitter takes T = ...");
    op.value = parse_number(arg.has_value ? arg.value : args, line);
  } else if (head.name == "P") {
    op.kind = toolbox::OpKind::PhaseShift;
    if (arg.has_value && arg.name != "phi") bad(line, "phase takes phi = ...");
    op.value = parse_number(arg.has_value ? arg.value : args, line);
  } else {
    bad(line, "unknown operator '" + head.name + "'");
  }
  op.modes = parse_subscript_modes(head.subscript, toolbox::arity(op.kind), line);
  return op;
}

Herald parse_povm(const std::string& raw, int mode, int* detectors, int line) {
  Herald h;
  h.mode = mode;
  const std::string s = trim(raw);
  if (s == "I") {
    h.trivial = true;
    return h;
  }
  if (s.front() == '|') {
    // |n = K><n = K|
    const std::size_t eq = s.find('=');
    const std::size_t ket = s.find('>');
    if (eq == std::string::npos || ket == std::string::npos || eq > ket)
      bad(line, "photon projector must look like |n = K><n = K|");
    h.kind = toolbox::MeasKind::Pnrd;
    h.outcome = parse_int(trim(s.substr(eq + 1, ket - eq - 1)), line);
    return h;
  }
  const std::size_t open = s.find('(');
  if (open == std::string::npos || s.back() != ')')
    bad(line, "cannot read POVM '" + raw + "'");
  const std::string fn = trim(s.substr(0, open));
  const std::string args = trim(s.substr(open + 1, s.size() - open - 2));
  if (fn == "bucket") {
    h.kind = toolbox::MeasKind::Bucket;
    if (args == "no_click")
      h.outcome = 0;
    else if (args == "click")
      h.outcome = 1;
    else
      bad(line, "bucket outcome must be no_click or click");
  } else if (fn == "multiplex") {
    h.kind = toolbox::MeasKind::Multiplex;
    bool have_c = false;
    for (const std::string& part : split(args, ',')) {
      const Entry e = parse_entry(part);
      if (!e.has_value) bad(line, "multiplex takes c = ..., d = ...");
      if (e.name == "c") {
        h.outcome = parse_int(e.value, line);
        have_c = true;
      } else if (e.name == "d") {
        const int d = parse_int(e.value, line);
        if (*detectors > 0 && *detectors != d)
          bad(line, "conflicting multiplex detector counts");
        *detectors = d;
      } else {
        bad(line, "unknown multiplex argument '" + e.name + "'");
      }
    }
    if (!have_c) bad(line, "multiplex needs a click count c = ...");
  } else if (fn == "homodyne") {
    h.kind = toolbox::MeasKind::Homodyne;
    bool have_x = false;
    for (const std::string& part : split(args, ',')) {
      const Entry e = parse_entry(part);
      if (!e.has_value) bad(line, "homodyne takes x = ..., lambda = ...");
      if (e.name == "x") {
        h.x = parse_number(e.value, line);
        have_x = true;
      } else if (e.name == "lambda") {
        h.lambda = parse_number(e.value, line);
      } else {
        bad(line, "unknown homodyne argument '" + e.name + "'");
      }
    }
    if (!have_x) bad(line, "homodyne needs an outcome x = ...");
  } else {
    bad(line, "unknown POVM '" + fn + "'");
  }
  return h;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt_polar(Complex z) {
  const double mag = std::abs(z);
  const double ph = std::arg(z);
  if (mag == 0.0) return "0";
  if (ph == 0.0) return fmt(mag);
  const double wrapped = ph < 0 ? ph + 2 * M_PI : ph;
  return fmt(mag) + " e^{i" + fmt(wrapped) + "}";
}

}  // namespace

ExperimentPlan parse_plan(const std::string& text) {
  ExperimentPlan plan;
  plan.n_modes = 0;
  plan.multiplex_detectors = 0;  // 0 = unset, defaulted at the end
  bool saw_input = false;
  std::vector<Herald> povm_lines;

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  int next_mode = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    const std::size_t hash = s.find('#');
    if (hash != std::string::npos) s = trim(s.substr(0, hash));
    if (s.empty()) continue;
    const std::size_t colon = s.find(':');
    if (colon == std::string::npos)
      bad(line, "expected 'key: value', got '" + s + "'");
    const Entry key = parse_entry(s.substr(0, colon));
    const std::string rest = trim(s.substr(colon + 1));
    if (key.name == "psi" && (key.subscript == "in" || key.subscript.empty())) {
      if (saw_input) bad(line, "duplicate psi_in line");
      saw_input = true;
      for (const std::string& part : split(rest, ',')) {
        if (part.empty()) bad(line, "empty input entry");
        InputState st = parse_input_entry(part, next_mode, line);
        next_mode += static_cast<int>(st.modes.size());
        plan.inputs.push_back(std::move(st));
      }
      plan.n_modes = next_mode;
    } else if (key.name == "O") {
      if (rest == "---" || rest.empty()) continue;  // empty slot
      plan.ops.push_back(parse_op(rest, line));
    } else if (key.name == "POVM") {
      Herald h = parse_povm(
          rest,
          key.subscript.empty()
              ? static_cast<int>(povm_lines.size())
              : parse_int(key.subscript, line) - 1,
          &plan.multiplex_detectors, line);
      povm_lines.push_back(h);
    } else if (key.name == "detectors") {
      const int d = parse_int(rest, line);
      if (plan.multiplex_detectors > 0 && plan.multiplex_detectors != d)
        bad(line, "conflicting multiplex detector counts");
      plan.multiplex_detectors = d;
    } else {
      bad(line, "unknown key '" + key.name + "'");
    }
  }
  if (!saw_input) throw ConfigError("circuit has no psi_in line");
  plan.heralds = std::move(povm_lines);
  if (plan.multiplex_detectors == 0) plan.multiplex_detectors = 16;
  try {
    plan.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("circuit: ") + e.what());
  }
  return plan;
}

ExperimentPlan load_plan(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open circuit file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_plan(ss.str());
}

std::string plan_to_text(const ExperimentPlan& plan) {
  std::ostringstream out;
  out << "psi_in: ";
  for (std::size_t i = 0; i < plan.inputs.size(); ++i) {
    const InputState& in = plan.inputs[i];
    if (i) out << ", ";
    const std::string sub =
        in.modes.size() == 2
            ? std::to_string(in.modes[0] + 1) + std::to_string(in.modes[1] + 1)
            : std::to_string(in.modes[0] + 1);
    switch (in.kind) {
      case toolbox::StateKind::Fock:
        out << "n_" << sub << " = " << in.fock_n;
        break;
      case toolbox::StateKind::Coherent:
        out << "alpha_" << sub << " = " << fmt_polar(in.amp);
        break;
      case toolbox::StateKind::SqueezedVac:
      case toolbox::StateKind::TwoModeSqueezedVac:
        out << "zeta_" << sub << " = " << fmt_polar(in.amp);
        break;
    }
  }
  out << "\n";
  int op_no = 0;
  for (const PlanOp& op : plan.ops) {
    out << "O_" << ++op_no << ": ";
    std::string sub;
    for (int m : op.modes) sub += std::to_string(m + 1);
    switch (op.kind) {
      case toolbox::OpKind::Identity:
        out << "I";
        break;
      case toolbox::OpKind::Displacement:
        out << "D_" << sub << "(alpha = " << fmt_polar(op.amp) << ")";
        break;
      case toolbox::OpKind::Squeeze:
      case toolbox::OpKind::TwoModeSqueeze:
        out << "S_" << sub << "(zeta = " << fmt_polar(op.amp) << ")";
        break;
      case toolbox::OpKind::PhaseShift:
        out << "P_" << sub << "(phi = " << fmt(op.value) << ")";
        break;
      case toolbox::OpKind::BeamSplitter:
        out << "U_" << sub << "(T = " << fmt(op.value) << ")";
        break;
    }
    out << "\n";
  }
  for (const Herald& h : plan.heralds) {
    out << "POVM_" << (h.mode + 1) << ": ";
    if (h.trivial) {
      out << "I";
    } else {
      switch (h.kind) {
        case toolbox::MeasKind::Pnrd:
          out << "|n = " << h.outcome << "><n = " << h.outcome << "|";
          break;
        case toolbox::MeasKind::Bucket:
          out << "bucket(" << (h.outcome ? "click" : "no_click") << ")";
          break;
        case toolbox::MeasKind::Multiplex:
          out << "multiplex(c = " << h.outcome
              << ", d = " << plan.multiplex_detectors << ")";
          break;
        case toolbox::MeasKind::Homodyne:
          out << "homodyne(x = " << fmt(h.x) << ", lambda = " << fmt(h.lambda)
              << ")";
          break;
      }
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace herald::circuit
