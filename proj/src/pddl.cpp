#include "stnbt/pddl.h"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <sstream>

namespace stnbt {

ParseError::ParseError(const std::string &msg, int line, int col)
    : std::runtime_error(msg + " (line " + std::to_string(line) + ", column " +
                         std::to_string(col) + ")"),
      line(line),
      col(col) {}

UnsupportedFeatureError::UnsupportedFeatureError(const std::string &feature)
    : std::runtime_error("unsupported feature: " + feature), feature(feature) {}

Millis parse_seconds(const std::string &text) {
    size_t dot = text.find('.');
    std::string whole = dot == std::string::npos ? text : text.substr(0, dot);
    std::string frac = dot == std::string::npos ? "" : text.substr(dot + 1);
    if (whole.empty() && frac.empty()) {
        throw std::invalid_argument("empty number: '" + text + "'");
    }
    bool negative = false;
    if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) {
        negative = whole[0] == '-';
        whole = whole.substr(1);
    }
    if (frac.size() > 3) {
        throw std::invalid_argument("sub-millisecond precision not supported: '" +
                                    text + "'");
    }
    for (char c : whole + frac) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            throw std::invalid_argument("malformed number: '" + text + "'");
        }
    }
    while (frac.size() < 3) frac += '0';
    Millis value = 0;
    if (!whole.empty()) value = std::stoll(whole) * 1000;
    value += std::stoll(frac);
    return negative ? -value : value;
}

std::string format_seconds(Millis ms) {
    std::ostringstream out;
    if (ms < 0) {
        out << '-';
        ms = -ms;
    }
    out << ms / 1000 << '.';
    Millis frac = ms % 1000;
    out << char('0' + frac / 100) << char('0' + frac / 10 % 10)
        << char('0' + frac % 10);
    return out.str();
}

std::string Fluent::str() const {
    std::string out = "(" + name;
    for (const auto &a : args) out += " " + a;
    return out + ")";
}

std::string Literal::str() const {
    return positive ? fluent.str() : "(not " + fluent.str() + ")";
}

const DurativeActionSchema *Domain::find_schema(const std::string &n) const {
    for (const auto &s : schemas) {
        if (s.name == n) return &s;
    }
    return nullptr;
}

bool Domain::is_subtype(const std::string &t, const std::string &ancestor) const {
    if (ancestor == "object") return true;
    std::string cur = t;
    while (true) {
        if (cur == ancestor) return true;
        auto it = types.find(cur);
        if (it == types.end() || it->second == cur) return false;
        cur = it->second;
    }
}

namespace {

struct SExpr {
    bool is_atom = false;
    std::string atom;
    std::vector<SExpr> list;
    int line = 0;
    int col = 0;

    const std::string &head() const {
        static const std::string empty;
        if (is_atom || list.empty() || !list[0].is_atom) return empty;
        return list[0].atom;
    }
};

class SExprReader {
public:
    explicit SExprReader(const std::string &text) : text_(text) {}

    std::vector<SExpr> read_all() {
        std::vector<SExpr> out;
        skip_space();
        while (pos_ < text_.size()) {
            out.push_back(read());
            skip_space();
        }
        return out;
    }

private:
    SExpr read() {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", line_, col_);
        SExpr e;
        e.line = line_;
        e.col = col_;
        if (text_[pos_] == '(') {
            advance();
            skip_space();
            while (pos_ < text_.size() && text_[pos_] != ')') {
                e.list.push_back(read());
                skip_space();
            }
            if (pos_ >= text_.size()) throw ParseError("missing ')'", e.line, e.col);
            advance();
            return e;
        }
        if (text_[pos_] == ')') throw ParseError("unexpected ')'", line_, col_);
        e.is_atom = true;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
               text_[pos_] != '(' && text_[pos_] != ')' && text_[pos_] != ';') {
            e.atom += static_cast<char>(
                std::tolower(static_cast<unsigned char>(text_[pos_])));
            advance();
        }
        return e;
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    const std::string &text_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

[[noreturn]] void fail(const SExpr &at, const std::string &msg) {
    throw ParseError(msg, at.line, at.col);
}

void insert_checked(LiteralSet &set, const Literal &lit, const SExpr &at,
                    const char *what) {
    if (set.count(lit.negated())) {
        fail(at, std::string(what) + " contains both " + lit.fluent.str() +
                     " and its negation");
    }
    set.insert(lit);
}

// Parses "a b c - type d - type2 ..." lists shared by :types, :objects,
// :constants and :parameters.
template <typename Emit>
void parse_typed_list(const std::vector<SExpr> &items, size_t begin,
                      const SExpr &ctx, Emit emit) {
    std::vector<std::string> pending;
    for (size_t i = begin; i < items.size(); ++i) {
        if (!items[i].is_atom) fail(items[i], "expected a name in typed list");
        if (items[i].atom == "-") {
            if (i + 1 >= items.size() || !items[i + 1].is_atom) {
                fail(items[i], "expected a type after '-'");
            }
            for (const auto &n : pending) emit(n, items[i + 1].atom);
            pending.clear();
            ++i;
        } else {
            pending.push_back(items[i].atom);
        }
    }
    for (const auto &n : pending) emit(n, "object");
    (void)ctx;
}

Literal parse_literal(const SExpr &e, const Domain *domain) {
    if (e.is_atom) fail(e, "expected a literal");
    if (e.head() == "not") {
        if (e.list.size() != 2) fail(e, "(not ...) takes one argument");
        Literal inner = parse_literal(e.list[1], domain);
        if (!inner.positive) fail(e, "double negation");
        return inner.negated();
    }
    if (e.list.empty() || !e.list[0].is_atom) fail(e, "expected a predicate");
    for (const char *bad : {"and", "or", "when", "forall", "exists", "imply"}) {
        if (e.head() == bad) {
            if (e.head() == "when") throw UnsupportedFeatureError("conditional effects (when)");
            if (e.head() == "forall" || e.head() == "exists") {
                throw UnsupportedFeatureError("quantified conditions (" + e.head() + ")");
            }
            fail(e, "'" + e.head() + "' not allowed here");
        }
    }
    for (const char *numeric : {"=", ">=", "<=", ">", "<", "increase", "decrease", "assign"}) {
        if (e.head() == numeric) {
            throw UnsupportedFeatureError("numeric fluents (" + e.head() + ")");
        }
    }
    Literal lit;
    lit.fluent.name = e.list[0].atom;
    for (size_t i = 1; i < e.list.size(); ++i) {
        if (!e.list[i].is_atom) fail(e.list[i], "expected an argument name");
        lit.fluent.args.push_back(e.list[i].atom);
    }
    if (domain) {
        auto it = domain->predicates.find(lit.fluent.name);
        if (it == domain->predicates.end()) {
            fail(e, "undeclared predicate '" + lit.fluent.name + "'");
        }
        if (it->second.size() != lit.fluent.args.size()) {
            fail(e, "predicate '" + lit.fluent.name + "' expects " +
                        std::to_string(it->second.size()) + " arguments");
        }
    }
    return lit;
}

// A timed condition/effect is either (at start X), (over all X), (at end X)
// or an (and ...) of those. X itself may be a literal or an (and ...) of
// literals.
void parse_timed_set(const SExpr &e, const Domain &domain, bool is_effect,
                     LiteralSet &at_start, LiteralSet *over_all, LiteralSet &at_end,
                     const char *what) {
    if (e.is_atom) fail(e, "expected a timed expression");
    if (e.list.empty()) return;  // "()" — empty condition/effect
    if (e.head() == "and") {
        for (size_t i = 1; i < e.list.size(); ++i) {
            parse_timed_set(e.list[i], domain, is_effect, at_start, over_all, at_end, what);
        }
        return;
    }
    LiteralSet *target = nullptr;
    const SExpr *body = nullptr;
    if (e.head() == "at" && e.list.size() == 3 && e.list[1].is_atom) {
        if (e.list[1].atom == "start") target = &at_start;
        if (e.list[1].atom == "end") target = &at_end;
        body = &e.list[2];
    } else if (e.head() == "over" && e.list.size() == 3 && e.list[1].is_atom &&
               e.list[1].atom == "all") {
        if (!over_all) fail(e, "(over all ...) not allowed in effects");
        target = over_all;
        body = &e.list[2];
    }
    if (!target || !body) {
        fail(e, std::string("expected (at start ...), (over all ...) or (at end ...) in ") + what);
    }
    std::vector<const SExpr *> literals;
    if (!body->is_atom && body->head() == "and") {
        for (size_t i = 1; i < body->list.size(); ++i) literals.push_back(&body->list[i]);
    } else {
        literals.push_back(body);
    }
    for (const SExpr *l : literals) {
        insert_checked(*target, parse_literal(*l, &domain), *l, what);
    }
}

void parse_duration(const SExpr &e, DurativeActionSchema &schema) {
    if (e.is_atom) fail(e, "expected a duration constraint");
    auto bound = [&](const SExpr &c) {
        if (c.list.size() != 3 || !c.list[1].is_atom || c.list[1].atom != "?duration" ||
            !c.list[2].is_atom) {
            fail(c, "expected (<op> ?duration <number>)");
        }
        Millis v;
        try {
            v = parse_seconds(c.list[2].atom);
        } catch (const std::invalid_argument &err) {
            fail(c.list[2], err.what());
        }
        if (v < 0) fail(c.list[2], "negative duration");
        if (c.head() == "=") {
            schema.duration_min = schema.duration_max = v;
        } else if (c.head() == ">=") {
            schema.duration_min = v;
        } else if (c.head() == "<=") {
            schema.duration_max = v;
        } else {
            throw UnsupportedFeatureError("duration constraint (" + c.head() + " ?duration ...)");
        }
    };
    if (e.head() == "and") {
        for (size_t i = 1; i < e.list.size(); ++i) bound(e.list[i]);
    } else {
        bound(e);
    }
    if (schema.duration_min > schema.duration_max) {
        fail(e, "duration lower bound exceeds upper bound");
    }
}

DurativeActionSchema parse_durative_action(const SExpr &e, const Domain &domain) {
    DurativeActionSchema schema;
    if (e.list.size() < 2 || !e.list[1].is_atom) fail(e, "expected an action name");
    schema.name = e.list[1].atom;
    for (size_t i = 2; i < e.list.size(); i += 2) {
        if (!e.list[i].is_atom || i + 1 >= e.list.size()) {
            fail(e.list[i], "expected :keyword value pairs in action body");
        }
        const std::string &key = e.list[i].atom;
        const SExpr &val = e.list[i + 1];
        if (key == ":parameters") {
            if (val.is_atom) fail(val, "expected a parameter list");
            parse_typed_list(val.list, 0, val, [&](const std::string &n, const std::string &t) {
                if (n.empty() || n[0] != '?') fail(val, "parameter names must start with '?'");
                if (!t.empty() && t != "object" && !domain.types.count(t)) {
                    fail(val, "undeclared type '" + t + "'");
                }
                schema.params.push_back({n, t});
            });
        } else if (key == ":duration") {
            parse_duration(val, schema);
        } else if (key == ":condition") {
            parse_timed_set(val, domain, false, schema.cond_start, &schema.cond_overall,
                            schema.cond_end, "condition");
        } else if (key == ":effect") {
            parse_timed_set(val, domain, true, schema.eff_start, nullptr, schema.eff_end,
                            "effect");
        } else {
            fail(e.list[i], "unknown action section '" + key + "'");
        }
    }
    return schema;
}

const std::set<std::string> kSupportedRequirements = {
    ":strips", ":typing", ":durative-actions", ":negative-preconditions",
};

}  // namespace

Domain parse_domain(const std::string &text) {
    SExprReader reader(text);
    auto top = reader.read_all();
    if (top.size() != 1 || top[0].is_atom || top[0].head() != "define") {
        throw ParseError("expected a single (define (domain ...)) form", 1, 1);
    }
    const SExpr &def = top[0];
    Domain domain;
    domain.types["object"] = "object";
    for (size_t i = 1; i < def.list.size(); ++i) {
        const SExpr &sec = def.list[i];
        if (sec.is_atom) fail(sec, "expected a domain section");
        const std::string &head = sec.head();
        if (head == "domain") {
            if (sec.list.size() != 2 || !sec.list[1].is_atom) fail(sec, "expected (domain name)");
            domain.name = sec.list[1].atom;
        } else if (head == ":requirements") {
            for (size_t j = 1; j < sec.list.size(); ++j) {
                const std::string &req = sec.list[j].atom;
                if (!kSupportedRequirements.count(req)) {
                    throw UnsupportedFeatureError("requirement " + req);
                }
                domain.requirements.insert(req);
            }
        } else if (head == ":types") {
            parse_typed_list(sec.list, 1, sec, [&](const std::string &n, const std::string &t) {
                domain.types[n] = t;
                if (!domain.types.count(t)) domain.types[t] = "object";
            });
        } else if (head == ":constants") {
            parse_typed_list(sec.list, 1, sec, [&](const std::string &n, const std::string &t) {
                domain.constants.push_back({n, t});
            });
        } else if (head == ":predicates") {
            for (size_t j = 1; j < sec.list.size(); ++j) {
                const SExpr &p = sec.list[j];
                if (p.is_atom || p.list.empty() || !p.list[0].is_atom) {
                    fail(p, "expected a predicate declaration");
                }
                std::vector<std::string> types;
                parse_typed_list(p.list, 1, p, [&](const std::string &, const std::string &t) {
                    types.push_back(t);
                });
                domain.predicates[p.list[0].atom] = types;
            }
        } else if (head == ":durative-action") {
            domain.schemas.push_back(parse_durative_action(sec, domain));
        } else if (head == ":action") {
            throw UnsupportedFeatureError("non-durative actions (:action)");
        } else if (head == ":functions") {
            throw UnsupportedFeatureError("numeric fluents (:functions)");
        } else {
            fail(sec, "unknown domain section '" + head + "'");
        }
    }
    if (!domain.requirements.count(":durative-actions")) {
        throw UnsupportedFeatureError(
            "domain without :durative-actions requirement");
    }
    return domain;
}

namespace {

const TypedObject *find_object(const Problem &problem, const std::string &name) {
    for (const auto &o : problem.objects) {
        if (o.name == name) return &o;
    }
    return nullptr;
}

void check_ground_fluent(const Fluent &f, const Domain &domain, const Problem &problem,
                         const SExpr &at) {
    auto it = domain.predicates.find(f.name);
    if (it == domain.predicates.end()) fail(at, "undeclared predicate '" + f.name + "'");
    if (it->second.size() != f.args.size()) {
        fail(at, "predicate '" + f.name + "' expects " + std::to_string(it->second.size()) +
                     " arguments");
    }
    for (size_t i = 0; i < f.args.size(); ++i) {
        const TypedObject *obj = find_object(problem, f.args[i]);
        if (!obj) fail(at, "undeclared object '" + f.args[i] + "'");
        if (!domain.is_subtype(obj->type, it->second[i])) {
            fail(at, "object '" + obj->name + "' of type '" + obj->type +
                         "' does not match parameter type '" + it->second[i] + "'");
        }
    }
}

}  // namespace

Problem parse_problem(const std::string &text, const Domain &domain) {
    SExprReader reader(text);
    auto top = reader.read_all();
    if (top.size() != 1 || top[0].is_atom || top[0].head() != "define") {
        throw ParseError("expected a single (define (problem ...)) form", 1, 1);
    }
    const SExpr &def = top[0];
    Problem problem;
    problem.objects = domain.constants;
    const SExpr *init_sec = nullptr;
    const SExpr *goal_sec = nullptr;
    for (size_t i = 1; i < def.list.size(); ++i) {
        const SExpr &sec = def.list[i];
        if (sec.is_atom) fail(sec, "expected a problem section");
        const std::string &head = sec.head();
        if (head == "problem") {
            if (sec.list.size() != 2 || !sec.list[1].is_atom) fail(sec, "expected (problem name)");
            problem.name = sec.list[1].atom;
        } else if (head == ":domain") {
            if (sec.list.size() != 2 || !sec.list[1].is_atom) fail(sec, "expected (:domain name)");
            problem.domain_name = sec.list[1].atom;
            if (problem.domain_name != domain.name) {
                fail(sec, "problem references domain '" + problem.domain_name +
                              "' but '" + domain.name + "' was parsed");
            }
        } else if (head == ":objects") {
            parse_typed_list(sec.list, 1, sec, [&](const std::string &n, const std::string &t) {
                if (!t.empty() && t != "object" && !domain.types.count(t)) {
                    fail(sec, "undeclared type '" + t + "'");
                }
                problem.objects.push_back({n, t});
            });
        } else if (head == ":init") {
            init_sec = &sec;
        } else if (head == ":goal") {
            goal_sec = &sec;
        } else if (head == ":metric") {
            throw UnsupportedFeatureError("metrics (:metric)");
        } else {
            fail(sec, "unknown problem section '" + head + "'");
        }
    }
    if (init_sec) {
        for (size_t j = 1; j < init_sec->list.size(); ++j) {
            const SExpr &f = init_sec->list[j];
            if (!f.is_atom && f.head() == "at" && f.list.size() == 3 && f.list[1].is_atom &&
                std::isdigit(static_cast<unsigned char>(f.list[1].atom[0]))) {
                throw UnsupportedFeatureError("timed initial literals");
            }
            Literal lit = parse_literal(f, &domain);
            if (!lit.positive) {
                fail(f, "negative literal in :init (closed-world initial state)");
            }
            check_ground_fluent(lit.fluent, domain, problem, f);
            problem.init.insert(lit.fluent);
        }
    }
    if (goal_sec) {
        if (goal_sec->list.size() != 2) fail(*goal_sec, "expected (:goal <condition>)");
        const SExpr &g = goal_sec->list[1];
        std::vector<const SExpr *> literals;
        if (!g.is_atom && g.head() == "and") {
            for (size_t j = 1; j < g.list.size(); ++j) literals.push_back(&g.list[j]);
        } else if (!g.is_atom && !g.list.empty()) {
            literals.push_back(&g);
        }
        for (const SExpr *l : literals) {
            Literal lit = parse_literal(*l, &domain);
            check_ground_fluent(lit.fluent, domain, problem, *l);
            insert_checked(problem.goal, lit, *l, "goal");
        }
    }
    return problem;
}

namespace {

Literal substitute(const Literal &lit, const std::map<std::string, std::string> &binding,
                   const std::string &action) {
    Literal out = lit;
    for (auto &arg : out.fluent.args) {
        if (!arg.empty() && arg[0] == '?') {
            auto it = binding.find(arg);
            if (it == binding.end()) {
                throw std::runtime_error("unbound parameter " + arg + " in action " + action);
            }
            arg = it->second;
        }
    }
    return out;
}

LiteralSet substitute_set(const LiteralSet &lits,
                          const std::map<std::string, std::string> &binding,
                          const std::string &action) {
    LiteralSet out;
    for (const auto &l : lits) out.insert(substitute(l, binding, action));
    return out;
}

}  // namespace

GroundedDurativeAction ground_action(const DurativeActionSchema &schema,
                                     const std::vector<std::string> &args,
                                     const Domain &domain, const Problem &problem) {
    if (args.size() != schema.params.size()) {
        throw std::runtime_error("action " + schema.name + " expects " +
                                 std::to_string(schema.params.size()) + " arguments, got " +
                                 std::to_string(args.size()));
    }
    std::map<std::string, std::string> binding;
    for (size_t i = 0; i < args.size(); ++i) {
        const TypedObject *obj = find_object(problem, args[i]);
        if (!obj) throw std::runtime_error("undeclared object '" + args[i] + "'");
        if (!domain.is_subtype(obj->type, schema.params[i].type)) {
            throw std::runtime_error("object '" + args[i] + "' does not match type '" +
                                     schema.params[i].type + "' of parameter " +
                                     schema.params[i].name);
        }
        binding[schema.params[i].name] = args[i];
    }
    GroundedDurativeAction out;
    out.schema_name = schema.name;
    out.signature = "(" + schema.name;
    for (const auto &a : args) out.signature += " " + a;
    out.signature += ")";
    out.cond_start = substitute_set(schema.cond_start, binding, schema.name);
    out.cond_overall = substitute_set(schema.cond_overall, binding, schema.name);
    out.cond_end = substitute_set(schema.cond_end, binding, schema.name);
    out.eff_start = substitute_set(schema.eff_start, binding, schema.name);
    out.eff_end = substitute_set(schema.eff_end, binding, schema.name);
    out.duration_min = schema.duration_min;
    out.duration_max = schema.duration_max;
    return out;
}

TemporalPlan parse_plan(const std::string &text, const Domain &domain,
                        const Problem &problem) {
    TemporalPlan plan;
    plan.problem_ref = problem.name;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::set<std::pair<std::string, Millis>> seen;
    while (std::getline(in, line)) {
        ++lineno;
        size_t comment = line.find(';');
        if (comment != std::string::npos) line = line.substr(0, comment);
        size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;

        size_t colon = line.find(':');
        size_t open = line.find('(');
        size_t close = line.find(')');
        size_t lbrack = line.find('[');
        size_t rbrack = line.find(']');
        if (colon == std::string::npos || open == std::string::npos ||
            close == std::string::npos || lbrack == std::string::npos ||
            rbrack == std::string::npos || !(colon < open && open < close &&
                                             close < lbrack && lbrack < rbrack)) {
            throw ParseError("malformed plan line, expected 'TIME: (NAME ARGS...) [DURATION]'",
                             lineno, static_cast<int>(first) + 1);
        }

        TimedAction step;
        std::string time_text = line.substr(first, colon - first);
        std::string dur_text = line.substr(lbrack + 1, rbrack - lbrack - 1);
        try {
            step.start = parse_seconds(time_text);
            step.duration = parse_seconds(dur_text);
        } catch (const std::invalid_argument &err) {
            throw ParseError(err.what(), lineno, 1);
        }
        if (step.start < 0) throw ParseError("negative start time", lineno, 1);

        std::istringstream body(line.substr(open + 1, close - open - 1));
        std::string name;
        body >> name;
        std::transform(name.begin(), name.end(), name.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (name.empty()) throw ParseError("missing action name", lineno, static_cast<int>(open) + 1);
        std::vector<std::string> args;
        std::string arg;
        while (body >> arg) {
            std::transform(arg.begin(), arg.end(), arg.begin(),
                           [](unsigned char c) { return std::tolower(c); });
            args.push_back(arg);
        }

        const DurativeActionSchema *schema = domain.find_schema(name);
        if (!schema) throw ParseError("unknown action '" + name + "'", lineno, static_cast<int>(open) + 1);
        try {
            step.action = ground_action(*schema, args, domain, problem);
        } catch (const std::runtime_error &err) {
            throw ParseError(err.what(), lineno, static_cast<int>(open) + 1);
        }
        if (step.duration < schema->duration_min || step.duration > schema->duration_max) {
            throw ParseError("duration " + format_seconds(step.duration) + " of " +
                                 step.action.signature + " outside [" +
                                 format_seconds(schema->duration_min) + ", " +
                                 (schema->duration_max == kForever
                                      ? std::string("inf")
                                      : format_seconds(schema->duration_max)) + "]",
                             lineno, static_cast<int>(lbrack) + 1);
        }
        auto key = std::make_pair(step.action.signature, step.start);
        if (!seen.insert(key).second) {
            throw ParseError("duplicate plan step " + step.action.signature + " at t=" +
                                 format_seconds(step.start), lineno, 1);
        }
        plan.steps.push_back(std::move(step));
    }
    return plan;
}

std::string render_plan(const TemporalPlan &plan) {
    std::string out;
    for (const auto &s : plan.steps) {
        out += format_seconds(s.start) + ": " + s.action.signature + "  [" +
               format_seconds(s.duration) + "]\n";
    }
    return out;
}

namespace {

void render_typed_objects(std::ostream &out, const std::vector<TypedObject> &objs) {
    for (const auto &o : objs) {
        out << " " << o.name;
        if (!o.type.empty() && o.type != "object") out << " - " << o.type;
    }
}

void render_timed(std::ostream &out, const LiteralSet &set, const char *tag) {
    for (const auto &l : set) out << " (" << tag << " " << l.str() << ")";
}

}  // namespace

std::string render_domain(const Domain &domain) {
    std::ostringstream out;
    out << "(define (domain " << domain.name << ")\n";
    out << "  (:requirements";
    for (const auto &r : domain.requirements) out << " " << r;
    out << ")\n";
    bool any_type = false;
    for (const auto &[t, parent] : domain.types) {
        if (t != "object") any_type = true;
        (void)parent;
    }
    if (any_type) {
        out << "  (:types";
        for (const auto &[t, parent] : domain.types) {
            if (t == "object") continue;
            out << " " << t;
            if (parent != "object") out << " - " << parent;
        }
        out << ")\n";
    }
    if (!domain.constants.empty()) {
        out << "  (:constants";
        render_typed_objects(out, domain.constants);
        out << ")\n";
    }
    out << "  (:predicates";
    for (const auto &[name, types] : domain.predicates) {
        out << " (" << name;
        for (size_t i = 0; i < types.size(); ++i) {
            out << " ?a" << i;
            if (types[i] != "object") out << " - " << types[i];
        }
        out << ")";
    }
    out << ")\n";
    for (const auto &s : domain.schemas) {
        out << "  (:durative-action " << s.name << "\n";
        out << "    :parameters (";
        for (size_t i = 0; i < s.params.size(); ++i) {
            if (i) out << " ";
            out << s.params[i].name;
            if (s.params[i].type != "object") out << " - " << s.params[i].type;
        }
        out << ")\n";
        out << "    :duration ";
        if (s.duration_min == s.duration_max) {
            out << "(= ?duration " << format_seconds(s.duration_min) << ")\n";
        } else if (s.duration_max == kForever) {
            out << "(>= ?duration " << format_seconds(s.duration_min) << ")\n";
        } else {
            out << "(and (>= ?duration " << format_seconds(s.duration_min)
                << ") (<= ?duration " << format_seconds(s.duration_max) << "))\n";
        }
        out << "    :condition (and";
        render_timed(out, s.cond_start, "at start");
        render_timed(out, s.cond_overall, "over all");
        render_timed(out, s.cond_end, "at end");
        out << ")\n";
        out << "    :effect (and";
        render_timed(out, s.eff_start, "at start");
        render_timed(out, s.eff_end, "at end");
        out << "))\n";
    }
    out << ")\n";
    return out.str();
}

std::string render_problem(const Problem &problem) {
    std::ostringstream out;
    out << "(define (problem " << problem.name << ")\n";
    out << "  (:domain " << problem.domain_name << ")\n";
    out << "  (:objects";
    render_typed_objects(out, problem.objects);
    out << ")\n";
    out << "  (:init";
    for (const auto &f : problem.init) out << " " << f.str();
    out << ")\n";
    out << "  (:goal (and";
    for (const auto &l : problem.goal) out << " " << l.str();
    out << ")))\n";
    return out.str();
}

}  // namespace stnbt
