#include "lm/lp/lp_file.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "lm/core/json_io.hpp"

namespace lm::lp {

namespace {

std::string format_number(double value) {
  if (value == kInf) return "inf";
  if (value == -kInf) return "-inf";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

void append_terms(std::ostream& out, const std::vector<std::pair<int, double>>& entries,
                  const LinearProgram& lp) {
  bool first = true;
  for (const auto& [var, coef] : entries) {
    if (first) {
      if (coef < 0) out << "- " << format_number(-coef);
      else out << format_number(coef);
      first = false;
    } else {
      if (coef < 0) out << " - " << format_number(-coef);
      else out << " + " << format_number(coef);
    }
    out << " " << lp.variable_name(var);
  }
  if (first) out << "0 " << lp.variable_name(0);
}

}  // namespace

std::string lp_to_string(const LinearProgram& lp) {
  lp.validate();
  if (lp.num_variables() == 0) {
    throw std::invalid_argument("cannot export an LP without variables");
  }
  std::ostringstream out;
  out << "\\ levelmatch LP export\n";
  for (const std::string& note : lp.notes()) out << "\\ note: " << note << "\n";
  out << "\\ vars:";
  for (int v = 0; v < lp.num_variables(); ++v) out << " " << lp.variable_name(v);
  out << "\n";
  out << (lp.sense() == Sense::Maximize ? "Maximize\n" : "Minimize\n");
  out << " obj: ";
  std::vector<std::pair<int, double>> obj_terms;
  for (int v = 0; v < lp.num_variables(); ++v) {
    if (lp.objective(v) != 0.0) obj_terms.emplace_back(v, lp.objective(v));
  }
  append_terms(out, obj_terms, lp);
  out << "\nSubject To\n";
  for (int i = 0; i < lp.num_rows(); ++i) {
    const Row& row = lp.row(i);
    out << " " << (row.name.empty() ? "c" + std::to_string(i) : row.name) << ": ";
    append_terms(out, row.entries, lp);
    switch (row.rel) {
      case Relation::LE: out << " <= "; break;
      case Relation::GE: out << " >= "; break;
      case Relation::EQ: out << " = "; break;
    }
    out << format_number(row.rhs) << "\n";
  }
  out << "Bounds\n";
  for (int v = 0; v < lp.num_variables(); ++v) {
    const double lo = lp.lower(v);
    const double up = lp.upper(v);
    const std::string& name = lp.variable_name(v);
    if (lo == -kInf && up == kInf) {
      out << " " << name << " free\n";
    } else if (lo == up) {
      out << " " << name << " = " << format_number(lo) << "\n";
    } else {
      out << " " << format_number(lo) << " <= " << name << " <= " << format_number(up) << "\n";
    }
  }
  out << "End\n";
  return out.str();
}

namespace {

struct Tokenizer {
  std::vector<std::string> tokens;
  std::vector<std::string> notes;
  size_t pos = 0;

  explicit Tokenizer(const std::string& text) {
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      if (!line.empty() && line[0] == '\\') {
        if (line.rfind("\\ vars:", 0) == 0) {
          std::istringstream words(line.substr(7));
          std::string word;
          tokens.push_back("\\vars");
          while (words >> word) tokens.push_back(word);
          tokens.push_back("\\endvars");
        } else if (line.rfind("\\ note: ", 0) == 0) {
          notes.push_back(line.substr(8));
        }
        continue;
      }
      std::istringstream words(line);
      std::string word;
      while (words >> word) tokens.push_back(word);
    }
  }

  bool done() const { return pos >= tokens.size(); }
  const std::string& peek() const { return tokens[pos]; }
  std::string next() { return tokens[pos++]; }
};

bool iequals(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

bool parse_number(const std::string& word, double& out) {
  if (iequals(word, "inf") || iequals(word, "+inf")) {
    out = kInf;
    return true;
  }
  if (iequals(word, "-inf")) {
    out = -kInf;
    return true;
  }
  char* end = nullptr;
  out = std::strtod(word.c_str(), &end);
  return end != nullptr && *end == '\0' && end != word.c_str();
}

}  // namespace

LinearProgram lp_from_string(const std::string& text) {
  Tokenizer tok(text);
  LinearProgram lp;
  for (const std::string& note : tok.notes) lp.add_note(note);
  std::map<std::string, int> index;

  auto var_index = [&](const std::string& name) {
    auto it = index.find(name);
    if (it != index.end()) return it->second;
    // Default LP-format bounds; overridden by the Bounds section.
    const int v = lp.add_variable(name, 0.0, kInf);
    index.emplace(name, v);
    return v;
  };

  // Optional variable-order preamble.
  if (!tok.done() && tok.peek() == "\\vars") {
    tok.next();
    while (!tok.done() && tok.peek() != "\\endvars") var_index(tok.next());
    if (!tok.done()) tok.next();
  }

  if (tok.done()) throw std::invalid_argument("LP parse: empty document");
  std::string word = tok.next();
  if (iequals(word, "maximize") || iequals(word, "max")) {
    lp.set_sense(Sense::Maximize);
  } else if (iequals(word, "minimize") || iequals(word, "min")) {
    lp.set_sense(Sense::Minimize);
  } else {
    throw std::invalid_argument("LP parse: expected Maximize or Minimize, got " + word);
  }

  // Reads "sign coef name" terms until a section keyword or relation shows up.
  auto parse_terms = [&](std::vector<std::pair<int, double>>& terms, std::string& stop) {
    double sign = 1.0;
    bool have_coef = false;
    double coef = 1.0;
    while (!tok.done()) {
      word = tok.peek();
      if (word == "+" || word == "-") {
        tok.next();
        sign *= word == "-" ? -1.0 : 1.0;
        continue;
      }
      if (word == "<=" || word == ">=" || word == "=" || iequals(word, "subject") ||
          iequals(word, "st") || iequals(word, "s.t.") || iequals(word, "bounds") ||
          iequals(word, "end") || word.back() == ':') {
        stop = word;
        return;
      }
      tok.next();
      double number;
      if (!have_coef && parse_number(word, number)) {
        coef = number;
        have_coef = true;
        continue;
      }
      terms.emplace_back(var_index(word), sign * coef);
      sign = 1.0;
      coef = 1.0;
      have_coef = false;
    }
    stop.clear();
  };

  // Objective: "obj:" then terms.
  if (tok.done() || tok.peek().back() != ':') {
    throw std::invalid_argument("LP parse: expected objective label");
  }
  tok.next();
  std::vector<std::pair<int, double>> obj_terms;
  std::string stop;
  parse_terms(obj_terms, stop);
  for (const auto& [v, c] : obj_terms) lp.set_objective(v, lp.objective(v) + c);

  if (!iequals(stop, "subject") && !iequals(stop, "st") && !iequals(stop, "s.t.")) {
    throw std::invalid_argument("LP parse: expected Subject To after the objective");
  }
  tok.next();
  if (iequals(stop, "subject")) {
    if (tok.done() || !iequals(tok.peek(), "to")) {
      throw std::invalid_argument("LP parse: expected To after Subject");
    }
    tok.next();
  }

  // Rows until Bounds/End.
  while (!tok.done() && !iequals(tok.peek(), "bounds") && !iequals(tok.peek(), "end")) {
    word = tok.next();
    if (word.back() != ':') {
      throw std::invalid_argument("LP parse: expected row label, got " + word);
    }
    std::string name = word.substr(0, word.size() - 1);
    std::vector<std::pair<int, double>> terms;
    parse_terms(terms, stop);
    Relation rel;
    if (stop == "<=") rel = Relation::LE;
    else if (stop == ">=") rel = Relation::GE;
    else if (stop == "=") rel = Relation::EQ;
    else throw std::invalid_argument("LP parse: row " + name + " lacks a relation");
    tok.next();
    double rhs;
    if (tok.done() || !parse_number(tok.next(), rhs)) {
      throw std::invalid_argument("LP parse: row " + name + " lacks a right-hand side");
    }
    lp.add_row(std::move(terms), rel, rhs, std::move(name));
  }

  // Bounds section.
  if (!tok.done() && iequals(tok.peek(), "bounds")) {
    tok.next();
    while (!tok.done() && !iequals(tok.peek(), "end")) {
      double first;
      if (parse_number(tok.peek(), first)) {
        // "lo <= name <= up"
        tok.next();
        if (tok.done() || tok.next() != "<=") {
          throw std::invalid_argument("LP parse: malformed bound line");
        }
        const int v = var_index(tok.next());
        if (tok.done() || tok.next() != "<=") {
          throw std::invalid_argument("LP parse: malformed bound line");
        }
        double up;
        if (tok.done() || !parse_number(tok.next(), up)) {
          throw std::invalid_argument("LP parse: malformed bound line");
        }
        lp.set_bounds(v, first, up);
      } else {
        const int v = var_index(tok.next());
        if (tok.done()) throw std::invalid_argument("LP parse: truncated bound line");
        word = tok.next();
        if (iequals(word, "free")) {
          lp.set_bounds(v, -kInf, kInf);
        } else if (word == "=" || word == "<=" || word == ">=") {
          double value;
          if (tok.done() || !parse_number(tok.next(), value)) {
            throw std::invalid_argument("LP parse: malformed bound line");
          }
          if (word == "=") lp.set_bounds(v, value, value);
          else if (word == "<=") lp.set_bounds(v, lp.lower(v), value);
          else lp.set_bounds(v, value, lp.upper(v));
        } else {
          throw std::invalid_argument("LP parse: malformed bound line near " + word);
        }
      }
    }
  }
  lp.validate();
  return lp;
}

void save_lp(const LinearProgram& lp, const std::string& path) {
  write_text_file(path, lp_to_string(lp));
}

LinearProgram load_lp(const std::string& path) { return lp_from_string(read_text_file(path)); }

std::string solution_to_json(const LinearProgram& lp, const LPSolution& solution) {
  nlohmann::ordered_json doc;
  doc["status"] = to_string(solution.status);
  doc["objective"] = solution.objective_value;
  nlohmann::ordered_json values = nlohmann::ordered_json::object();
  if (!solution.values.empty()) {
    for (int v = 0; v < lp.num_variables(); ++v) {
      values[lp.variable_name(v)] = solution.values[v];
    }
  }
  doc["values"] = std::move(values);
  return doc.dump(2) + "\n";
}

LPSolution solution_from_json(const LinearProgram& lp, const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw std::invalid_argument(std::string("solution JSON parse error: ") + err.what());
  }
  LPSolution solution;
  const std::string status = doc.value("status", "");
  if (status == "optimal") solution.status = Status::Optimal;
  else if (status == "infeasible") solution.status = Status::Infeasible;
  else if (status == "unbounded") solution.status = Status::Unbounded;
  else if (status == "limit") solution.status = Status::Limit;
  else throw std::invalid_argument("solution JSON: unknown status '" + status + "'");
  solution.objective_value = doc.value("objective", 0.0);
  solution.backend = "external";

  if (solution.status == Status::Optimal) {
    if (!doc.contains("values")) {
      throw std::invalid_argument("solution JSON: optimal status requires values");
    }
    const auto& values = doc["values"];
    solution.values.assign(lp.num_variables(), 0.0);
    if (values.is_array()) {
      if (static_cast<int>(values.size()) != lp.num_variables()) {
        throw std::invalid_argument("solution JSON: value array length mismatch");
      }
      for (int v = 0; v < lp.num_variables(); ++v) solution.values[v] = values[v].get<double>();
    } else if (values.is_object()) {
      std::map<std::string, int> index;
      for (int v = 0; v < lp.num_variables(); ++v) index[lp.variable_name(v)] = v;
      int found = 0;
      for (const auto& [name, value] : values.items()) {
        auto it = index.find(name);
        if (it == index.end()) {
          throw std::invalid_argument("solution JSON: unknown variable " + name);
        }
        solution.values[it->second] = value.get<double>();
        ++found;
      }
      if (found != lp.num_variables()) {
        throw std::invalid_argument("solution JSON: missing variable values");
      }
    } else {
      throw std::invalid_argument("solution JSON: values must be an array or object");
    }
  }
  return solution;
}

}  // namespace lm::lp
