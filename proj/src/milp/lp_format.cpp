#include "vpp/milp/lp_format.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace vpp::milp {

namespace {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool legal_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
           c == '(' || c == ')';
}

std::vector<std::string> sanitized_names(const MilpModel& model) {
    std::vector<std::string> names;
    names.reserve(static_cast<size_t>(model.num_variables()));
    std::unordered_set<std::string> used;
    for (const auto& v : model.variables()) {
        std::string s;
        s.reserve(v.name.size());
        for (char c : v.name) s.push_back(legal_name_char(c) ? c : '_');
        if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == 'e' ||
            s[0] == 'E')
            s = "v_" + s;
        std::string candidate = s;
        int suffix = 2;
        while (!used.insert(candidate).second) candidate = s + "_" + std::to_string(suffix++);
        names.push_back(candidate);
    }
    return names;
}

void append_expr(std::string& out, const LinearExpr& expr,
                 const std::vector<std::string>& names) {
    bool first = true;
    for (const auto& [v, c] : expr.terms()) {
        if (first) {
            out += c < 0 ? "- " : "";
            first = false;
        } else {
            out += c < 0 ? " - " : " + ";
        }
        double mag = std::fabs(c);
        if (mag != 1.0) {
            out += format_number(mag);
            out += ' ';
        }
        out += names[static_cast<size_t>(v.index)];
    }
    if (first) out += "0 " + names.front();  // degenerate all-constant expression
}

}  // namespace

std::string write_lp_format(const MilpModel& model, const std::string& title) {
    if (model.num_variables() == 0)
        throw ValidationError("write_lp_format: model has no variables");
    std::vector<std::string> names = sanitized_names(model);

    std::string out;
    out += "\\ " + title + "\n";
    if (model.objective().constant() != 0.0)
        out += "\\ objective-constant " + format_number(model.objective().constant()) + "\n";
    out += model.direction() == Direction::Maximize ? "Maximize\n" : "Minimize\n";
    out += " obj: ";
    append_expr(out, model.objective(), names);
    out += "\nSubject To\n";
    int row = 0;
    for (const auto& c : model.constraints()) {
        std::string rname = c.name.empty() ? "c" + std::to_string(row) : c.name;
        std::string clean;
        for (char ch : rname) clean.push_back(legal_name_char(ch) ? ch : '_');
        out += " " + clean + ": ";
        append_expr(out, c.expr, names);
        switch (c.sense) {
            case Sense::Le: out += " <= "; break;
            case Sense::Ge: out += " >= "; break;
            case Sense::Eq: out += " = "; break;
        }
        out += format_number(c.rhs - c.expr.constant());
        out += "\n";
        ++row;
    }

    out += "Bounds\n";
    for (int j = 0; j < model.num_variables(); ++j) {
        const Variable& v = model.variables()[static_cast<size_t>(j)];
        const std::string& nm = names[static_cast<size_t>(j)];
        if (v.kind == VarKind::Binary && v.lower == 0.0 && v.upper == 1.0) continue;
        if (!std::isfinite(v.lower) && !std::isfinite(v.upper)) {
            out += " " + nm + " free\n";
        } else if (v.lower == v.upper) {
            out += " " + nm + " = " + format_number(v.lower) + "\n";
        } else {
            std::string lo = std::isfinite(v.lower) ? format_number(v.lower) : "-inf";
            std::string hi = std::isfinite(v.upper) ? format_number(v.upper) : "+inf";
            out += " " + lo + " <= " + nm + " <= " + hi + "\n";
        }
    }

    bool any_binary = false;
    for (const auto& v : model.variables())
        if (v.kind == VarKind::Binary) {
            any_binary = true;
            break;
        }
    if (any_binary) {
        out += "Binaries\n";
        std::string line = "";
        for (int j = 0; j < model.num_variables(); ++j) {
            if (model.variables()[static_cast<size_t>(j)].kind != VarKind::Binary) continue;
            if (line.size() + names[static_cast<size_t>(j)].size() > 200) {
                out += line + "\n";
                line.clear();
            }
            line += " " + names[static_cast<size_t>(j)];
        }
        if (!line.empty()) out += line + "\n";
    }
    out += "End\n";
    return out;
}

void export_lp_file(const MilpModel& model, const std::string& path, const std::string& title) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << write_lp_format(model, title);
    if (!f) throw IoError("write failed on '" + path + "'");
}

// ---------------------------------------------------------------------------
// Reader

namespace {

struct Token {
    enum Kind { Name, Number, Op, End } kind = End;
    std::string text;
    double number = 0.0;
};

class Lexer {
  public:
    explicit Lexer(const std::string& text) : text_(text) {}

    // Comments run from a backslash to end of line; we capture the
    // objective-constant annotation while skipping them.
    double objective_constant() const { return obj_constant_; }

    Token next() {
        skip_space();
        if (pos_ >= text_.size()) return Token{Token::End, "", 0.0};
        char c = text_[pos_];
        if (c == '<' || c == '>' || c == '=' || c == '+' || c == '-' || c == ':') {
            size_t start = pos_++;
            if ((c == '<' || c == '>') && pos_ < text_.size() && text_[pos_] == '=') ++pos_;
            return Token{Token::Op, text_.substr(start, pos_ - start), 0.0};
        }
        size_t start = pos_;
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            // number, possibly with an exponent whose sign must not split it
            while (pos_ < text_.size()) {
                char ch = text_[pos_];
                if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.' || ch == 'e' ||
                    ch == 'E') {
                    ++pos_;
                } else if ((ch == '+' || ch == '-') && pos_ > start &&
                           (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E')) {
                    ++pos_;
                } else {
                    break;
                }
            }
            std::string word = text_.substr(start, pos_ - start);
            try {
                size_t used = 0;
                double v = std::stod(word, &used);
                if (used == word.size()) return Token{Token::Number, word, v};
            } catch (const std::exception&) {
            }
            return Token{Token::Name, word, 0.0};
        }
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
               text_[pos_] != '<' && text_[pos_] != '>' && text_[pos_] != '=' &&
               text_[pos_] != '+' && text_[pos_] != ':' && text_[pos_] != '\\')
            ++pos_;
        return Token{Token::Name, text_.substr(start, pos_ - start), 0.0};
    }

  private:
    void skip_space() {
        for (;;) {
            while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            if (pos_ < text_.size() && text_[pos_] == '\\') {
                size_t eol = text_.find('\n', pos_);
                std::string comment =
                    text_.substr(pos_, eol == std::string::npos ? std::string::npos : eol - pos_);
                std::istringstream is(comment.substr(1));
                std::string tag;
                if (is >> tag && tag == "objective-constant") is >> obj_constant_;
                pos_ = eol == std::string::npos ? text_.size() : eol + 1;
                continue;
            }
            break;
        }
    }

    const std::string& text_;
    size_t pos_ = 0;
    double obj_constant_ = 0.0;
};

bool iequals(const std::string& a, const char* b) {
    size_t n = 0;
    for (; b[n] && n < a.size(); ++n)
        if (std::tolower(static_cast<unsigned char>(a[n])) !=
            std::tolower(static_cast<unsigned char>(b[n])))
            return false;
    return b[n] == '\0' && n == a.size();
}

}  // namespace

MilpModel parse_lp_format(const std::string& text) {
    Lexer lex(text);
    Token tok = lex.next();

    auto fail = [](const std::string& why) -> void {
        throw IoError("lp parse error: " + why);
    };

    if (tok.kind != Token::Name || !(iequals(tok.text, "maximize") || iequals(tok.text, "minimize")))
        fail("expected Maximize or Minimize");
    Direction direction =
        iequals(tok.text, "maximize") ? Direction::Maximize : Direction::Minimize;

    struct PendingConstraint {
        std::string name;
        std::vector<std::pair<std::string, double>> terms;
        Sense sense = Sense::Le;
        double rhs = 0.0;
    };
    std::vector<std::pair<std::string, double>> objective;
    std::vector<PendingConstraint> constraints;
    struct BoundSpec {
        double lo = 0.0;
        double hi = kInfinity;
        bool set = false;
    };
    std::unordered_map<std::string, BoundSpec> bounds;
    std::unordered_set<std::string> binary_names;
    std::vector<std::string> var_order;
    std::unordered_set<std::string> seen;

    auto note_var = [&](const std::string& nm) {
        if (seen.insert(nm).second) var_order.push_back(nm);
    };

    enum Section { Objective, Constraints, BoundsSec, Binaries, Done };
    Section section = Objective;

    tok = lex.next();
    PendingConstraint current;
    bool current_named = false;
    double sign = 1.0;
    double coeff = 1.0;
    bool have_coeff = false;
    std::vector<std::pair<std::string, double>>* target = &objective;

    auto flush_constraint = [&]() {
        if (!current.terms.empty() || current_named) fail("constraint missing relation");
    };
    // registration is deferred past the label pop so "obj:" is not taken for a variable
    auto flush_objective = [&]() {
        for (const auto& [nm, c] : objective) {
            (void)c;
            note_var(nm);
        }
    };

    auto section_keyword = [&](const Token& t) -> int {
        if (t.kind != Token::Name) return -1;
        if (iequals(t.text, "subject")) return 1;
        if (iequals(t.text, "st") || iequals(t.text, "s.t.")) return 1;
        if (iequals(t.text, "bounds")) return 2;
        if (iequals(t.text, "binaries") || iequals(t.text, "binary") || iequals(t.text, "bin"))
            return 3;
        if (iequals(t.text, "end")) return 4;
        return -1;
    };

    // objective + constraints share an expression parser loop
    while (section == Objective || section == Constraints) {
        int kw = section_keyword(tok);
        if (kw > 0) {
            flush_constraint();
            if (section == Objective) flush_objective();
            if (kw == 1) {
                tok = lex.next();
                if (tok.kind == Token::Name && iequals(tok.text, "to")) tok = lex.next();
                section = Constraints;
                target = nullptr;
                continue;
            }
            section = kw == 2 ? BoundsSec : kw == 3 ? Binaries : Done;
            tok = lex.next();
            break;
        }
        if (tok.kind == Token::End) {
            if (section == Objective) flush_objective();
            section = Done;
            break;
        }

        if (section == Constraints && target == nullptr) {
            current = PendingConstraint{};
            current_named = false;
            target = &current.terms;
            sign = 1.0;
            coeff = 1.0;
            have_coeff = false;
        }

        if (tok.kind == Token::Op) {
            if (tok.text == "+") {
                sign = 1.0;
            } else if (tok.text == "-") {
                sign = -sign;
            } else if (tok.text == ":") {
                // previous bare name was a label
                if (section == Objective) {
                    // objective label: drop the recorded term
                    if (!objective.empty()) objective.pop_back();
                } else {
                    if (current.terms.empty()) fail("label without name");
                    current.name = current.terms.back().first;
                    current.terms.pop_back();
                    current_named = true;
                }
                sign = 1.0;
                coeff = 1.0;
                have_coeff = false;
            } else if (tok.text == "<=" || tok.text == ">=" || tok.text == "=" ||
                       tok.text == "<" || tok.text == ">") {
                if (section != Constraints) fail("relation outside constraint section");
                current.sense = tok.text[0] == '<' ? Sense::Le
                                : tok.text[0] == '>' ? Sense::Ge
                                                     : Sense::Eq;
                tok = lex.next();
                double rhs_sign = 1.0;
                while (tok.kind == Token::Op && (tok.text == "-" || tok.text == "+")) {
                    if (tok.text == "-") rhs_sign = -rhs_sign;
                    tok = lex.next();
                }
                if (tok.kind != Token::Number) fail("expected numeric right-hand side");
                current.rhs = rhs_sign * tok.number;
                for (auto& [nm, c] : current.terms) {
                    (void)c;
                    note_var(nm);
                }
                constraints.push_back(current);
                current = PendingConstraint{};
                current_named = false;
                target = nullptr;
                sign = 1.0;
                coeff = 1.0;
                have_coeff = false;
            } else {
                fail("unexpected operator '" + tok.text + "'");
            }
        } else if (tok.kind == Token::Number) {
            coeff = tok.number;
            have_coeff = true;
        } else {  // name
            double c = sign * (have_coeff ? coeff : 1.0);
            target->emplace_back(tok.text, c);
            sign = 1.0;
            coeff = 1.0;
            have_coeff = false;
        }
        tok = lex.next();
    }

    // bounds section
    while (section == BoundsSec) {
        int kw = section_keyword(tok);
        if (kw > 0) {
            section = kw == 3 ? Binaries : Done;
            tok = lex.next();
            if (kw == 1 || kw == 2) throw IoError("lp parse error: unexpected section order");
            break;
        }
        if (tok.kind == Token::End) {
            section = Done;
            break;
        }
        // forms: "lo <= x <= hi" | "x free" | "x = v" | "x <= hi" | "x >= lo"
        double first_sign = 1.0;
        while (tok.kind == Token::Op && (tok.text == "-" || tok.text == "+")) {
            if (tok.text == "-") first_sign = -first_sign;
            tok = lex.next();
        }
        auto parse_bound_value = [&](const Token& t, double sgn) -> double {
            if (t.kind == Token::Number) return sgn * t.number;
            if (t.kind == Token::Name && (iequals(t.text, "inf") || iequals(t.text, "infinity")))
                return sgn * kInfinity;
            if (t.kind == Token::Name && (t.text == "-inf" || t.text == "+inf"))
                return t.text[0] == '-' ? -kInfinity : kInfinity;
            fail("expected bound value");
            return 0.0;
        };

        if (tok.kind == Token::Number ||
            (tok.kind == Token::Name && (iequals(tok.text, "inf") || iequals(tok.text, "infinity") ||
                                         tok.text == "-inf" || tok.text == "+inf"))) {
            double lo = parse_bound_value(tok, first_sign);
            tok = lex.next();
            if (!(tok.kind == Token::Op && (tok.text == "<=" || tok.text == "<")))
                fail("expected <= after lower bound");
            tok = lex.next();
            if (tok.kind != Token::Name) fail("expected variable in bound");
            std::string nm = tok.text;
            note_var(nm);
            tok = lex.next();
            if (!(tok.kind == Token::Op && (tok.text == "<=" || tok.text == "<")))
                fail("expected <= after variable");
            tok = lex.next();
            double sgn = 1.0;
            while (tok.kind == Token::Op && (tok.text == "-" || tok.text == "+")) {
                if (tok.text == "-") sgn = -sgn;
                tok = lex.next();
            }
            double hi = parse_bound_value(tok, sgn);
            bounds[nm] = BoundSpec{lo, hi, true};
            tok = lex.next();
        } else if (tok.kind == Token::Name) {
            std::string nm = tok.text;
            tok = lex.next();
            if (tok.kind == Token::Name && iequals(tok.text, "free")) {
                note_var(nm);
                bounds[nm] = BoundSpec{-kInfinity, kInfinity, true};
                tok = lex.next();
            } else if (tok.kind == Token::Op &&
                       (tok.text == "=" || tok.text == "<=" || tok.text == ">=" ||
                        tok.text == "<" || tok.text == ">")) {
                std::string op = tok.text;
                tok = lex.next();
                double sgn = 1.0;
                while (tok.kind == Token::Op && (tok.text == "-" || tok.text == "+")) {
                    if (tok.text == "-") sgn = -sgn;
                    tok = lex.next();
                }
                double v = parse_bound_value(tok, sgn);
                note_var(nm);
                BoundSpec spec = bounds.count(nm) ? bounds[nm] : BoundSpec{0.0, kInfinity, true};
                if (op[0] == '=') {
                    spec.lo = spec.hi = v;
                } else if (op[0] == '<') {
                    spec.hi = v;
                } else {
                    spec.lo = v;
                }
                spec.set = true;
                bounds[nm] = spec;
                tok = lex.next();
            } else {
                fail("malformed bound line near '" + nm + "'");
            }
        } else {
            fail("malformed bounds section");
        }
    }

    while (section == Binaries) {
        int kw = section_keyword(tok);
        if (kw == 4) {
            section = Done;
            break;
        }
        if (tok.kind == Token::End) {
            section = Done;
            break;
        }
        if (tok.kind != Token::Name) throw IoError("lp parse error: bad binaries section");
        binary_names.insert(tok.text);
        note_var(tok.text);
        tok = lex.next();
    }

    // assemble the model
    MilpModel model;
    std::unordered_map<std::string, VarId> ids;
    for (const std::string& nm : var_order) {
        Variable v;
        v.name = nm;
        if (binary_names.count(nm)) {
            v.kind = VarKind::Binary;
            v.lower = 0.0;
            v.upper = 1.0;
        }
        if (auto it = bounds.find(nm); it != bounds.end() && it->second.set) {
            v.lower = it->second.lo;
            v.upper = it->second.hi;
        }
        ids[nm] = model.add_variable(v);
    }
    for (const auto& pc : constraints) {
        LinearExpr e;
        for (const auto& [nm, c] : pc.terms) e.add(ids.at(nm), c);
        model.add_constraint(std::move(e), pc.sense, pc.rhs, pc.name);
    }
    LinearExpr obj;
    for (const auto& [nm, c] : objective) obj.add(ids.at(nm), c);
    obj.add_constant(lex.objective_constant());
    model.set_objective(std::move(obj), direction);
    return model;
}

MilpModel read_lp_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_lp_format(ss.str());
}

}  // namespace vpp::milp
