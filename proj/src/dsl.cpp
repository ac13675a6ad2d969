#include "insitu/dsl.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "insitu/editor.hpp"

namespace insitu {

namespace {

enum class Tok { ident, number, string, punct, end };
enum class Suffix { none, m, cm };

struct Token {
    Tok type = Tok::end;
    std::string text;
    double number = 0.0;
    Suffix suffix = Suffix::none;
    int line = 1;
    int col = 1;
};

bool ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space();
            Token t;
            t.line = line_;
            t.col = col_;
            if (pos_ >= text_.size()) {
                out.push_back(t);
                return out;
            }
            const char c = text_[pos_];
            if (ident_start(c)) {
                t.type = Tok::ident;
                t.text = lex_ident();
            } else if (digit(c) || (c == '.' && pos_ + 1 < text_.size() && digit(text_[pos_ + 1]))) {
                lex_number(t);
            } else if (c == '"') {
                t.type = Tok::string;
                t.text = lex_string(t);
            } else if (std::string_view("{}[](),;:=+-*").find(c) != std::string_view::npos) {
                t.type = Tok::punct;
                t.text = std::string(1, c);
                advance();
            } else {
                throw SyntaxError(line_, col_, "unexpected character '" + printable(c) + "'");
            }
            out.push_back(std::move(t));
        }
    }

private:
    static std::string printable(char c) {
        const auto u = static_cast<unsigned char>(c);
        if (u >= 32 && u < 127) return std::string(1, c);
        static constexpr char hex[] = "0123456789abcdef";
        return std::string("\\x") + hex[u >> 4] + hex[u & 15];
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

    void skip_space() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else {
                break;
            }
        }
    }

    std::string lex_ident() {
        const std::size_t start = pos_;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            // A hyphen joins words ("lathe-profile") but never precedes a digit.
            if (ident_char(c) ||
                (c == '-' && pos_ + 1 < text_.size() && ident_start(text_[pos_ + 1]))) {
                advance();
            } else {
                break;
            }
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    void lex_number(Token& t) {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (digit(text_[pos_]) || text_[pos_] == '.')) advance();
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
            if (look < text_.size() && digit(text_[look])) {
                while (pos_ < look) advance();
                while (pos_ < text_.size() && digit(text_[pos_])) advance();
            }
        }
        const std::string_view body = text_.substr(start, pos_ - start);
        double value = 0.0;
        auto [end, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
        if (ec != std::errc{} || end != body.data() + body.size() || !std::isfinite(value)) {
            throw SyntaxError(t.line, t.col, "malformed number '" + std::string(body) + "'");
        }
        t.type = Tok::number;
        t.number = value;
        if (pos_ < text_.size() && ident_start(text_[pos_])) {
            const std::string unit = lex_ident();
            if (unit == "m") {
                t.suffix = Suffix::m;
            } else if (unit == "cm") {
                t.suffix = Suffix::cm;
            } else {
                throw SyntaxError(t.line, t.col, "unknown unit suffix '" + unit + "'");
            }
        }
        t.text = std::string(text_.substr(start, pos_ - start));
    }

    std::string lex_string(const Token& t) {
        advance();  // opening quote
        std::string out;
        while (true) {
            if (pos_ >= text_.size() || text_[pos_] == '\n') {
                throw SyntaxError(t.line, t.col, "unterminated string");
            }
            const char c = text_[pos_];
            if (c == '"') {
                advance();
                return out;
            }
            if (c == '\\') {
                advance();
                if (pos_ >= text_.size()) throw SyntaxError(t.line, t.col, "unterminated string");
                const char e = text_[pos_];
                switch (e) {
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    default:
                        throw SyntaxError(line_, col_, "unknown escape '\\" + printable(e) + "'");
                }
                advance();
                continue;
            }
            out += c;
            advance();
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

struct Pos {
    int line = 1;
    int col = 1;
};

struct PendingConstraint {
    Constraint constraint;
    Pos pos;
};

struct PendingRef {
    std::string name;
    Pos pos;
};

struct PendingSlot {
    std::string slot;
    SlotValue value;
    Pos pos;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    Design run() {
        expect_keyword("design");
        design_.id = expect_string("design id");
        if (design_.id.empty()) fail(prev(), "design id must not be empty");
        design_pos_ = pos_of(prev());
        expect_punct('{');
        while (!is_punct('}')) {
            if (peek().type == Tok::end) fail(peek(), "missing '}' to close the design");
            const Token& kw = expect_ident("statement");
            if (kw.text == "title") {
                if (has_title_) fail(kw, "duplicate title");
                has_title_ = true;
                design_.title = expect_string("title");
                expect_punct(';');
            } else if (kw.text == "param") {
                parse_param();
            } else if (kw.text == "constraint") {
                parse_constraint_statement();
            } else if (kw.text == "generator") {
                if (has_generator_) fail(kw, "duplicate generator block");
                parse_generator(kw);
            } else {
                fail(kw, "unknown statement '" + kw.text + "'");
            }
        }
        expect_punct('}');
        if (peek().type != Tok::end) fail(peek(), "unexpected text after the design");
        if (!has_title_) design_.title = design_.id;
        resolve();
        return std::move(design_);
    }

private:
    // --- token helpers ---------------------------------------------------

    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(i_ + ahead, toks_.size() - 1)];
    }
    const Token& prev() const { return toks_[i_ == 0 ? 0 : i_ - 1]; }
    const Token& next() {
        const Token& t = toks_[std::min(i_, toks_.size() - 1)];
        if (i_ < toks_.size() - 1) ++i_;
        return t;
    }
    static Pos pos_of(const Token& t) { return {t.line, t.col}; }

    [[noreturn]] static void fail(const Token& t, const std::string& msg) {
        throw SyntaxError(t.line, t.col, msg);
    }
    [[noreturn]] static void fail_at(ErrorCode code, Pos p, const std::string& msg) {
        throw SourceError(code, p.line, p.col, msg);
    }

    static std::string describe(const Token& t) {
        switch (t.type) {
            case Tok::end: return "end of input";
            case Tok::string: return "string \"" + t.text + "\"";
            default: return "'" + t.text + "'";
        }
    }

    bool is_punct(char c) const {
        return peek().type == Tok::punct && peek().text[0] == c;
    }
    bool is_keyword(std::string_view kw) const {
        return peek().type == Tok::ident && peek().text == kw;
    }
    void expect_punct(char c) {
        if (!is_punct(c)) fail(peek(), std::string("expected '") + c + "', found " + describe(peek()));
        next();
    }
    void expect_keyword(std::string_view kw) {
        if (!is_keyword(kw)) {
            fail(peek(), "expected '" + std::string(kw) + "', found " + describe(peek()));
        }
        next();
    }
    const Token& expect_ident(std::string_view what) {
        if (peek().type != Tok::ident) {
            fail(peek(), "expected " + std::string(what) + ", found " + describe(peek()));
        }
        return next();
    }
    std::string expect_string(std::string_view what) {
        if (peek().type != Tok::string) {
            fail(peek(), "expected " + std::string(what) + " string, found " + describe(peek()));
        }
        return next().text;
    }

    /// A possibly negated number literal. Unsuffixed numbers are multiplied
    /// by `unit_scale` (0.01 inside a cm-declared parameter).
    double number(double unit_scale = 1.0) {
        double sign = 1.0;
        if (is_punct('-')) {
            next();
            sign = -1.0;
        }
        if (peek().type != Tok::number) fail(peek(), "expected a number, found " + describe(peek()));
        const Token& t = next();
        return sign * apply_suffix(t, unit_scale);
    }

    static double apply_suffix(const Token& t, double unit_scale) {
        switch (t.suffix) {
            case Suffix::m: return t.number;
            case Suffix::cm: return t.number * 0.01;
            case Suffix::none: return t.number * unit_scale;
        }
        return t.number;
    }

    int positive_int(std::string_view what) {
        const Token& t = peek();
        const double v = number();
        if (v < 1.0 || v > 1e6 || v != std::floor(v)) {
            fail(t, std::string(what) + " must be a positive integer");
        }
        return static_cast<int>(v);
    }

    static bool reserved(std::string_view name) {
        return name == "true" || name == "false" || name == "path";
    }

    // --- linear forms ----------------------------------------------------

    LinearForm linear(double unit_scale) {
        LinearForm f;
        f.scale = 0.0;
        double sign = 1.0;
        if (is_punct('-')) {
            next();
            sign = -1.0;
        } else if (is_punct('+')) {
            next();
        }
        bool have_ref = false;
        while (true) {
            linear_atom(f, have_ref, sign, unit_scale);
            if (is_punct('+')) {
                sign = 1.0;
            } else if (is_punct('-')) {
                sign = -1.0;
            } else {
                break;
            }
            next();
        }
        if (!have_ref) f.scale = 1.0;
        return f;
    }

    void linear_atom(LinearForm& f, bool& have_ref, double sign, double unit_scale) {
        const Token& start = peek();
        auto add_ref = [&](const Token& name_tok, double coeff) {
            if (have_ref && *f.ref != name_tok.text) {
                fail(name_tok, "a bound may reference only one parameter");
            }
            refs_.push_back({name_tok.text, pos_of(name_tok)});
            f.ref = name_tok.text;
            f.scale += coeff;
            have_ref = true;
        };
        if (start.type == Tok::number) {
            const Token& num = next();
            if (is_punct('*')) {
                next();
                add_ref(expect_ident("parameter name"), sign * num.number);
            } else {
                f.offset += sign * apply_suffix(num, unit_scale);
            }
            return;
        }
        if (start.type == Tok::ident) {
            const Token& name = next();
            double coeff = 1.0;
            if (is_punct('*')) {
                next();
                if (peek().type != Tok::number) fail(peek(), "expected a coefficient");
                coeff = next().number;
            }
            add_ref(name, sign * coeff);
            return;
        }
        fail(start, "expected a number or parameter name, found " + describe(start));
    }

    // --- values ----------------------------------------------------------

    Vec2 point2(double unit_scale) {
        expect_punct('(');
        const double x = number(unit_scale);
        expect_punct(',');
        const double y = number(unit_scale);
        expect_punct(')');
        return {x, y};
    }

    BezierPath path_literal(double unit_scale) {
        expect_keyword("path");
        expect_punct('{');
        BezierPath path;
        while (!is_punct('}')) {
            CubicBezier seg;
            for (auto& p : seg.p) p = point2(unit_scale);
            expect_punct(';');
            path.segments.push_back(seg);
        }
        expect_punct('}');
        if (path.empty()) fail(prev(), "a path needs at least one segment");
        return path;
    }

    Value default_value(const ParameterKind& kind, double unit_scale) {
        const Token& t = peek();
        auto mismatch = [&]() -> Value {
            fail_at(ErrorCode::InvalidDefault, pos_of(t),
                    "default does not match the " + std::string(kind_name(kind)) + " kind");
        };
        if (is_numeric(kind)) {
            if (t.type != Tok::number && !is_punct('-')) mismatch();
            return number(unit_scale);
        }
        if (std::holds_alternative<BooleanKind>(kind)) {
            if (is_keyword("true") || is_keyword("false")) return next().text == "true";
            return mismatch();
        }
        if (std::holds_alternative<CurveKind>(kind)) {
            if (!is_keyword("path")) mismatch();
            return path_literal(unit_scale);
        }
        if (t.type != Tok::string) mismatch();
        return next().text;
    }

    // --- statements ------------------------------------------------------

    Unit unit_word(double& unit_scale) {
        unit_scale = 1.0;
        if (peek().type != Tok::ident) return Unit::none;
        const std::string& w = peek().text;
        Unit u = Unit::none;
        if (w == "m") {
            u = Unit::meters;
        } else if (w == "cm") {
            u = Unit::meters;
            unit_scale = 0.01;
        } else if (w == "deg") {
            u = Unit::degrees;
        } else if (w == "count") {
            u = Unit::count;
        } else if (w != "none") {
            return Unit::none;
        }
        next();
        return u;
    }

    ParameterKind kind_spec(double& unit_scale) {
        const Token& kw = expect_ident("parameter kind");
        unit_scale = 1.0;
        if (kw.text == "continuous") {
            ContinuousKind k;
            k.unit = unit_word(unit_scale);
            expect_punct('[');
            k.min = number(unit_scale);
            expect_punct(',');
            k.max = number(unit_scale);
            expect_punct(']');
            if (!(k.min < k.max)) fail(kw, "continuous range needs min < max");
            return k;
        }
        if (kw.text == "discrete") {
            DiscreteKind k;
            k.unit = unit_word(unit_scale);
            expect_punct('{');
            do {
                if (!k.levels.empty()) next();
                const Token& lt = peek();
                const double v = number(unit_scale);
                if (!k.levels.empty() && !(v > k.levels.back())) {
                    fail(lt, "discrete levels must be strictly increasing");
                }
                k.levels.push_back(v);
            } while (is_punct(','));
            expect_punct('}');
            return k;
        }
        if (kw.text == "option") {
            OptionKind k;
            expect_punct('{');
            do {
                if (!k.labels.empty()) next();
                const Token& lt = peek();
                auto label = expect_string("option label");
                if (std::find(k.labels.begin(), k.labels.end(), label) != k.labels.end()) {
                    fail(lt, "duplicate option label \"" + label + "\"");
                }
                k.labels.push_back(std::move(label));
            } while (is_punct(','));
            expect_punct('}');
            return k;
        }
        if (kw.text == "boolean") return BooleanKind{};
        if (kw.text == "text") return TextKind{positive_int("text length")};
        if (kw.text == "curve") {
            CurveKind k;
            k.segment_budget = positive_int("segment budget");
            const Token& plane = expect_ident("curve plane");
            if (plane.text == "lathe-profile") {
                k.plane = CurvePlane::lathe_profile;
            } else if (plane.text == "silhouette") {
                k.plane = CurvePlane::silhouette;
            } else {
                fail(plane, "unknown curve plane '" + plane.text + "'");
            }
            return k;
        }
        fail(kw, "unknown parameter kind '" + kw.text + "'");
    }

    HandleDef handle_clause() {
        HandleDef h;
        expect_keyword("anchor");
        expect_punct('(');
        for (int i = 0; i < 3; ++i) {
            if (i > 0) expect_punct(',');
            h.anchor[i] = linear(1.0);
        }
        expect_punct(')');
        expect_keyword("axis");
        const Token& axis_tok = peek();
        expect_punct('(');
        for (int i = 0; i < 3; ++i) {
            if (i > 0) expect_punct(',');
            h.axis[i] = number();
        }
        expect_punct(')');
        const double n = h.axis.norm();
        if (!(n > 1e-9)) fail(axis_tok, "handle axis must be non-zero");
        if (std::abs(n - 1.0) > 1e-12) h.axis /= n;
        expect_keyword("scale");
        const Token& scale_tok = peek();
        h.scale = number();
        if (h.scale == 0.0) fail(scale_tok, "handle scale must be non-zero");
        return h;
    }

    void parse_param() {
        const Token& name_tok = expect_ident("parameter name");
        if (reserved(name_tok.text)) fail(name_tok, "'" + name_tok.text + "' is reserved");
        if (design_.find(name_tok.text)) {
            fail_at(ErrorCode::DuplicateParameter, pos_of(name_tok),
                    "duplicate parameter '" + name_tok.text + "'");
        }
        ParameterDef def;
        def.name = name_tok.text;
        expect_punct(':');
        double unit_scale = 1.0;
        def.kind = kind_spec(unit_scale);

        bool has_default = false, has_group = false, has_ergo = false, has_handle = false;
        Pos default_pos = pos_of(name_tok);
        while (!is_punct(';')) {
            const Token& kw = expect_ident("parameter clause");
            auto once = [&](bool& flag) {
                if (flag) fail(kw, "duplicate '" + kw.text + "' clause");
                flag = true;
            };
            if (kw.text == "in") {
                if (!is_numeric(def.kind)) fail(kw, "only numeric parameters take 'in' bounds");
                const Pos cpos = pos_of(kw);
                expect_punct('[');
                Constraint c;
                c.target = def.name;
                c.lo = linear(unit_scale);
                expect_punct(',');
                c.hi = linear(unit_scale);
                expect_punct(']');
                constraints_.push_back({std::move(c), cpos});
            } else if (kw.text == "default") {
                once(has_default);
                default_pos = pos_of(peek());
                def.default_value = default_value(def.kind, unit_scale);
            } else if (kw.text == "group") {
                once(has_group);
                def.group = expect_string("group");
            } else if (kw.text == "ergonomic") {
                once(has_ergo);
                const Token& tag_tok = expect_ident("ergonomic tag");
                auto tag = parse_ergonomic_tag(tag_tok.text);
                if (!tag) fail(tag_tok, "unknown ergonomic tag '" + tag_tok.text + "'");
                ErgonomicBinding b{*tag, std::nullopt};
                if (is_punct('+')) {
                    next();
                    const Token& off = expect_ident("parameter name");
                    refs_.push_back({off.text, pos_of(off)});
                    b.offset_param = off.text;
                }
                def.ergonomic = b;
            } else if (kw.text == "handle") {
                once(has_handle);
                if (!is_numeric(def.kind)) fail(kw, "only numeric parameters take handles");
                def.handle = handle_clause();
            } else {
                fail(kw, "unknown parameter clause '" + kw.text + "'");
            }
        }
        expect_punct(';');
        if (!has_default) {
            fail_at(ErrorCode::InvalidDefault, pos_of(name_tok),
                    "parameter '" + def.name + "' has no default");
        }
        default_pos_.emplace(def.name, default_pos);
        design_.parameters.push_back(std::move(def));
    }

    void parse_constraint_statement() {
        const Token& target = expect_ident("constraint target");
        refs_.push_back({target.text, pos_of(target)});
        expect_keyword("in");
        expect_punct('[');
        Constraint c;
        c.target = target.text;
        c.lo = linear(1.0);
        expect_punct(',');
        c.hi = linear(1.0);
        expect_punct(']');
        expect_punct(';');
        constraints_.push_back({std::move(c), pos_of(target)});
    }

    void parse_generator(const Token& kw) {
        has_generator_ = true;
        generator_pos_ = pos_of(kw);
        const Token& name = expect_ident("generator name");
        auto gen = parse_generator_kind(name.text);
        if (!gen) fail(name, "unknown generator '" + name.text + "'");
        design_.generator.generator = *gen;
        const auto& specs = generator_slots(*gen);
        expect_punct('{');
        while (!is_punct('}')) {
            const Token& slot = expect_ident("slot name");
            const bool known = std::any_of(specs.begin(), specs.end(),
                                           [&](const SlotSpec& s) { return s.name == slot.text; });
            if (!known) fail(slot, "generator '" + name.text + "' has no slot '" + slot.text + "'");
            if (design_.generator.bindings.contains(slot.text)) {
                fail(slot, "slot '" + slot.text + "' bound twice");
            }
            expect_punct('=');
            SlotValue v;
            const Token& vt = peek();
            if (is_keyword("true") || is_keyword("false")) {
                v = next().text == "true";
            } else if (vt.type == Tok::ident) {
                v = ParamRef{next().text};
            } else if (vt.type == Tok::string) {
                v = next().text;
            } else {
                v = number();
            }
            expect_punct(';');
            design_.generator.bindings.emplace(slot.text, v);
            slots_.push_back({slot.text, v, pos_of(vt)});
        }
        expect_punct('}');
    }

    // --- resolution ------------------------------------------------------

    const ParameterDef& known(const std::string& name, Pos p) const {
        const auto* def = design_.find(name);
        if (!def) fail_at(ErrorCode::UnknownReference, p, "unknown parameter '" + name + "'");
        return *def;
    }

    static std::pair<double, double> range_of(const ParameterDef& def) {
        if (const auto* c = std::get_if<ContinuousKind>(&def.kind)) return {c->min, c->max};
        const auto& d = std::get<DiscreteKind>(def.kind);
        return {d.levels.front(), d.levels.back()};
    }

    void check_constraint(const PendingConstraint& pc) const {
        const auto& c = pc.constraint;
        const auto& target = known(c.target, pc.pos);
        if (!is_numeric(target.kind)) {
            fail_at(ErrorCode::KindMismatch, pc.pos, "constraint target '" + c.target +
                                                         "' is not numeric");
        }
        for (const auto* side : {&c.lo, &c.hi}) {
            if (!side->ref) continue;
            if (!is_numeric(known(*side->ref, pc.pos).kind)) {
                fail_at(ErrorCode::KindMismatch, pc.pos,
                        "constraint bound references non-numeric '" + *side->ref + "'");
            }
        }
        // lo <= hi must hold across the referenced parameters' ranges; both
        // sides are linear, so checking range endpoints suffices.
        auto corners = [&](const LinearForm& f) {
            std::vector<std::pair<double, double>> out;  // (ref value, form value)
            if (!f.ref) return std::vector<std::pair<double, double>>{{0.0, f.offset}};
            const auto [lo, hi] = range_of(design_.at(*f.ref));
            out.emplace_back(lo, f.scale * lo + f.offset);
            out.emplace_back(hi, f.scale * hi + f.offset);
            return out;
        };
        const bool shared = c.lo.ref && c.hi.ref && *c.lo.ref == *c.hi.ref;
        for (const auto& [x, lo] : corners(c.lo)) {
            for (const auto& [y, hi] : corners(c.hi)) {
                if (shared && x != y) continue;
                if (lo > hi + kBoundEpsilon) {
                    fail_at(ErrorCode::SyntaxError, pc.pos,
                            "bounds of '" + c.to_text() + "' can cross");
                }
            }
        }
    }

    void check_slots() const {
        const auto& specs = generator_slots(design_.generator.generator);
        for (const auto& spec : specs) {
            if (spec.required && !design_.generator.bindings.contains(spec.name)) {
                fail_at(ErrorCode::UnboundGeneratorSlot, generator_pos_,
                        "required slot '" + spec.name + "' is unbound");
            }
        }
        for (const auto& s : slots_) {
            const auto spec = std::find_if(specs.begin(), specs.end(),
                                           [&](const SlotSpec& x) { return x.name == s.slot; });
            bool ok = false;
            if (const auto* ref = std::get_if<ParamRef>(&s.value)) {
                const auto& kind = known(ref->name, s.pos).kind;
                switch (spec->type) {
                    case SlotType::number: ok = is_numeric(kind); break;
                    case SlotType::boolean: ok = std::holds_alternative<BooleanKind>(kind); break;
                    case SlotType::curve: ok = std::holds_alternative<CurveKind>(kind); break;
                    case SlotType::text:
                        ok = std::holds_alternative<TextKind>(kind) ||
                             std::holds_alternative<OptionKind>(kind);
                        break;
                }
            } else {
                switch (spec->type) {
                    case SlotType::number: ok = std::holds_alternative<double>(s.value); break;
                    case SlotType::boolean: ok = std::holds_alternative<bool>(s.value); break;
                    case SlotType::curve: ok = false; break;
                    case SlotType::text: ok = std::holds_alternative<std::string>(s.value); break;
                }
            }
            if (!ok) {
                fail_at(ErrorCode::UnboundGeneratorSlot, s.pos,
                        "slot '" + s.slot + "' is bound to an incompatible value");
            }
        }
    }

    void resolve() {
        if (!has_generator_) {
            fail_at(ErrorCode::UnboundGeneratorSlot, design_pos_, "design has no generator block");
        }
        for (const auto& r : refs_) known(r.name, r.pos);
        for (const auto& pc : constraints_) check_constraint(pc);
        for (const auto& def : design_.parameters) {
            if (def.ergonomic && def.ergonomic->offset_param &&
                !is_numeric(design_.at(*def.ergonomic->offset_param).kind)) {
                fail_at(ErrorCode::KindMismatch, default_pos_.at(def.name),
                        "ergonomic offset must be numeric");
            }
            if (def.handle) {
                for (const auto& a : def.handle->anchor) {
                    if (a.ref && !is_numeric(design_.at(*a.ref).kind)) {
                        fail_at(ErrorCode::KindMismatch, default_pos_.at(def.name),
                                "handle anchor references non-numeric '" + *a.ref + "'");
                    }
                }
            }
        }
        check_slots();

        for (auto& pc : constraints_) design_.constraints.push_back(pc.constraint);
        sort_constraints(design_.constraints);

        const Configuration config = default_configuration(design_);
        for (const auto& def : design_.parameters) {
            auto vs = violations_for(design_, config, def.name);
            if (!vs.empty()) {
                fail_at(ErrorCode::InvalidDefault, default_pos_.at(def.name),
                        "invalid default: " + vs.front().message);
            }
        }
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
    Design design_;
    Pos design_pos_;
    Pos generator_pos_;
    bool has_title_ = false;
    bool has_generator_ = false;
    std::vector<PendingConstraint> constraints_;
    std::vector<PendingRef> refs_;
    std::vector<PendingSlot> slots_;
    std::map<std::string, Pos> default_pos_;
};

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out + "\"";
}

std::string unit_text(Unit unit) {
    switch (unit) {
        case Unit::none: return "";
        case Unit::meters: return "m ";
        case Unit::degrees: return "deg ";
        case Unit::count: return "count ";
    }
    return "";
}

std::string kind_text(const ParameterKind& kind) {
    if (const auto* c = std::get_if<ContinuousKind>(&kind)) {
        return "continuous " + unit_text(c->unit) + "[" + format_number(c->min) + ", " +
               format_number(c->max) + "]";
    }
    if (const auto* d = std::get_if<DiscreteKind>(&kind)) {
        std::string out = "discrete " + unit_text(d->unit) + "{";
        for (std::size_t i = 0; i < d->levels.size(); ++i) {
            out += (i ? ", " : "") + format_number(d->levels[i]);
        }
        return out + "}";
    }
    if (const auto* o = std::get_if<OptionKind>(&kind)) {
        std::string out = "option {";
        for (std::size_t i = 0; i < o->labels.size(); ++i) {
            out += (i ? ", " : "") + quote(o->labels[i]);
        }
        return out + "}";
    }
    if (std::holds_alternative<BooleanKind>(kind)) return "boolean";
    if (const auto* t = std::get_if<TextKind>(&kind)) return "text " + std::to_string(t->max_len);
    const auto& k = std::get<CurveKind>(kind);
    return "curve " + std::to_string(k.segment_budget) + " " + std::string(to_string(k.plane));
}

std::string slot_text(const SlotValue& v) {
    if (const auto* r = std::get_if<ParamRef>(&v)) return r->name;
    if (const auto* d = std::get_if<double>(&v)) return format_number(*d);
    if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
    return quote(std::get<std::string>(v));
}

}  // namespace

std::string value_to_text(const Value& value) {
    if (const auto* d = std::get_if<double>(&value)) return format_number(*d);
    if (const auto* b = std::get_if<bool>(&value)) return *b ? "true" : "false";
    if (const auto* s = std::get_if<std::string>(&value)) return quote(*s);
    std::string out = "path {";
    for (const auto& seg : std::get<BezierPath>(value).segments) {
        out += " ";
        for (const auto& p : seg.p) {
            out += "(" + format_number(p.x()) + ", " + format_number(p.y()) + ")";
        }
        out += ";";
    }
    return out + " }";
}

Design parse_design(std::string_view text) {
    return Parser(Lexer(text).run()).run();
}

Design parse_design(const DesignSource& src) { return parse_design(src.text); }

DesignSource serialize_design(const Design& design) {
    std::string out = "design " + quote(design.id) + " {\n";
    out += "    title " + quote(design.title) + ";\n\n";
    for (const auto& p : design.parameters) {
        out += "    param " + p.name + " : " + kind_text(p.kind) + " default " +
               value_to_text(p.default_value) + " group " + quote(p.group);
        if (p.ergonomic) {
            out += " ergonomic " + std::string(to_string(p.ergonomic->tag));
            if (p.ergonomic->offset_param) out += " + " + *p.ergonomic->offset_param;
        }
        if (p.handle) {
            const auto& h = *p.handle;
            out += " handle anchor (" + h.anchor[0].to_text() + ", " + h.anchor[1].to_text() +
                   ", " + h.anchor[2].to_text() + ") axis (" + format_number(h.axis.x()) + ", " +
                   format_number(h.axis.y()) + ", " + format_number(h.axis.z()) + ") scale " +
                   format_number(h.scale);
        }
        out += ";\n";
    }
    if (!design.constraints.empty()) out += "\n";
    auto sorted = design.constraints;
    sort_constraints(sorted);
    for (const auto& c : sorted) out += "    constraint " + c.to_text() + ";\n";
    out += "\n    generator " + std::string(to_string(design.generator.generator)) + " {\n";
    for (const auto& spec : generator_slots(design.generator.generator)) {
        auto it = design.generator.bindings.find(spec.name);
        if (it == design.generator.bindings.end()) continue;
        out += "        " + spec.name + " = " + slot_text(it->second) + ";\n";
    }
    out += "    }\n}\n";
    return {std::move(out), design.id};
}

}  // namespace insitu
