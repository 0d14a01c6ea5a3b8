#include "ocsp/io.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <sstream>

namespace ocsp {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw SchemaError(path.empty() ? what : path + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) fail(path, std::string("missing field \"") + key + "\"");
    return *it;
}

std::string join(const std::string& path, const char* key) {
    return path.empty() ? key : path + "." + key;
}

std::string at(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

long long get_int(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<long long>();
}

std::string get_string(const Json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

const Json& get_array(const Json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array");
    return j;
}

Rational get_fraction(const Json& j, const std::string& path) {
    if (j.is_number_integer()) return to_rational(j.get<long long>());
    if (!j.is_string()) fail(path, "expected a fraction string or integer");
    try {
        return parse_rational(j.get<std::string>());
    } catch (const Error& e) {
        fail(path, e.what());
    }
}

std::vector<long long> get_int_array(const Json& j, const std::string& path) {
    std::vector<long long> out;
    for (std::size_t i = 0; i < get_array(j, path).size(); ++i)
        out.push_back(get_int(j[i], at(path, i)));
    return out;
}

std::vector<std::string> get_string_array(const Json& j, const std::string& path) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < get_array(j, path).size(); ++i)
        out.push_back(get_string(j[i], at(path, i)));
    return out;
}

Json perm_to_json(const Perm& p) { return Json(p); }

int checked_index(long long v, long long limit, const std::string& path) {
    if (v < 0 || v >= limit) fail(path, "index " + std::to_string(v) + " out of range");
    return static_cast<int>(v);
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (!in.good() && !in.eof()) throw IoError("read failed on " + path);
    return std::move(buf).str();
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out.good()) throw IoError("write failed on " + path);
}

std::string git_blob_sha1(const std::string& bytes) {
    std::string header = "blob " + std::to_string(bytes.size());
    header.push_back('\0');
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, header.data(), header.size()) != 1 ||
        EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx, md, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw IoError("sha1 digest failed");
    }
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

Json parse_json(const std::string& text, const std::string& where) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        fail(where, e.what());
    }
}

Json instance_to_json(const OcspInstance& inst) {
    Json preds = Json::array();
    for (const auto& p : inst.predicates()) {
        bool named = false;
        if (!p.name().empty()) {
            try {
                const OrderingPredicate resolved = OrderingPredicate::by_name(p.name());
                named = resolved.arity() == p.arity();
                for (long long r = 0; named && r < factorial(p.arity()); ++r)
                    named = resolved.payoff_by_rank(r) == p.payoff_by_rank(r);
            } catch (const Error&) {
                named = false;
            }
        }
        if (named) {
            preds.push_back({{"name", p.name()}});
            continue;
        }
        if (!p.is_zero_one())
            throw SchemaError("predicate \"" + p.name() +
                              "\" has fractional payoffs and no resolvable name");
        Json acc = Json::array();
        for (const auto& sigma : p.accepting()) acc.push_back(perm_to_json(sigma));
        preds.push_back({{"arity", p.arity()}, {"accepting", std::move(acc)}});
    }
    Json cons = Json::array();
    for (const auto& c : inst.constraints())
        cons.push_back({{"vars", c.vars}, {"pred", c.pred}, {"weight", format_rational(c.weight)}});
    return {{"predicates", std::move(preds)},
            {"variables", inst.variables()},
            {"constraints", std::move(cons)}};
}

OcspInstance instance_from_json(const Json& j) {
    OcspInstance inst;
    const Json& vars = get_array(field(j, "variables", ""), "variables");
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const std::string name = get_string(vars[i], at("variables", i));
        if (inst.variable_index(name) >= 0) fail(at("variables", i), "duplicate variable name");
        inst.add_variable(name);
    }

    const Json& preds = get_array(field(j, "predicates", ""), "predicates");
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const std::string path = at("predicates", i);
        if (!preds[i].is_object()) fail(path, "expected an object");
        if (preds[i].contains("name")) {
            const std::string name = get_string(preds[i]["name"], join(path, "name"));
            try {
                inst.add_predicate(OrderingPredicate::by_name(name));
            } catch (const Error& e) {
                fail(join(path, "name"), e.what());
            }
            continue;
        }
        const int arity =
            static_cast<int>(get_int(field(preds[i], "arity", path), join(path, "arity")));
        const Json& acc = get_array(field(preds[i], "accepting", path), join(path, "accepting"));
        std::vector<Perm> accepting;
        for (std::size_t k = 0; k < acc.size(); ++k) {
            Perm sigma;
            for (long long v : get_int_array(acc[k], at(join(path, "accepting"), k)))
                sigma.push_back(static_cast<int>(v));
            accepting.push_back(std::move(sigma));
        }
        try {
            inst.add_predicate(OrderingPredicate::from_accepting(arity, accepting));
        } catch (const Error& e) {
            fail(path, e.what());
        }
    }

    const Json& cons = get_array(field(j, "constraints", ""), "constraints");
    for (std::size_t i = 0; i < cons.size(); ++i) {
        const std::string path = at("constraints", i);
        std::vector<int> tuple;
        for (long long v : get_int_array(field(cons[i], "vars", path), join(path, "vars")))
            tuple.push_back(checked_index(v, static_cast<long long>(inst.variables().size()),
                                          join(path, "vars")));
        const int pred =
            checked_index(get_int(field(cons[i], "pred", path), join(path, "pred")),
                          static_cast<long long>(inst.predicates().size()), join(path, "pred"));
        const Rational weight = cons[i].contains("weight")
                                    ? get_fraction(cons[i]["weight"], join(path, "weight"))
                                    : Rational(1);
        try {
            inst.add_constraint(std::move(tuple), pred, weight);
        } catch (const Error& e) {
            fail(path, e.what());
        }
    }
    return inst;
}

Json ordering_to_json(const Ordering& ord) {
    Json ranks = Json::object();
    for (const auto& [name, rank] : ord.ranks) ranks[name] = rank;
    return {{"ranks", std::move(ranks)}};
}

Ordering ordering_from_json(const Json& j) {
    const Json& ranks = field(j, "ranks", "");
    if (!ranks.is_object()) fail("ranks", "expected an object");
    Ordering ord;
    for (const auto& [name, rank] : ranks.items())
        ord.ranks[name] = get_int(rank, join("ranks", name.c_str()));
    return ord;
}

Json distribution_to_json(const BaseDistribution& d) {
    Json atoms = Json::array();
    for (const auto& a : d.atoms())
        atoms.push_back({{"tuple", a.tuple}, {"p", format_rational(a.p)}});
    return {{"t", d.t()}, {"m", d.m()},  {"Q1", d.q1()},
            {"Q2", d.q2()}, {"atoms", std::move(atoms)}};
}

BaseDistribution distribution_from_json(const Json& j) {
    const int t = static_cast<int>(get_int(field(j, "t", ""), "t"));
    const int m = static_cast<int>(get_int(field(j, "m", ""), "m"));
    std::vector<long long> q1 = get_int_array(field(j, "Q1", ""), "Q1");
    std::vector<long long> q2 = get_int_array(field(j, "Q2", ""), "Q2");
    std::vector<BaseDistribution::Atom> atoms;
    const Json& arr = get_array(field(j, "atoms", ""), "atoms");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string path = at("atoms", i);
        BaseDistribution::Atom a;
        a.tuple = get_int_array(field(arr[i], "tuple", path), join(path, "tuple"));
        a.p = get_fraction(field(arr[i], "p", path), join(path, "p"));
        atoms.push_back(std::move(a));
    }
    try {
        return BaseDistribution(t, m, std::move(q1), std::move(q2), std::move(atoms));
    } catch (const Error& e) {
        fail("", e.what());
    }
}

BaseDistribution distribution_by_spec(const std::string& spec) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t colon = spec.find(':', start);
        parts.push_back(spec.substr(start, colon - start));
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    const auto num = [&](std::size_t i) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(parts[i], &used);
            if (used != parts[i].size()) throw std::invalid_argument("trailing junk");
            return v;
        } catch (const std::exception&) {
            throw SchemaError("distribution spec \"" + spec + "\": bad number \"" + parts[i] +
                              "\"");
        }
    };
    const auto arity_is = [&](std::size_t n) {
        if (parts.size() != n)
            throw SchemaError("distribution spec \"" + spec + "\": wrong parameter count");
    };
    if (parts[0] == "decouple") {
        if (parts.size() < 2) throw SchemaError("decouple: needs a wrapped spec");
        return BaseDistribution::decouple(distribution_by_spec(spec.substr(spec.find(':') + 1)));
    }
    try {
        if (parts[0] == "btw") {
            arity_is(2);
            return BaseDistribution::btw_base(num(1));
        }
        if (parts[0] == "nbtw") {
            if (parts.size() == 2) return BaseDistribution::nbtw_base(num(1));
            arity_is(3);
            return BaseDistribution::nbtw_permuted(num(1), num(2));
        }
        if (parts[0] == "so") {
            arity_is(4);
            return BaseDistribution::so_base(num(1), num(2), num(3));
        }
    } catch (const SchemaError&) {
        throw;
    } catch (const Error& e) {
        throw SchemaError("distribution spec \"" + spec + "\": " + e.what());
    }
    throw SchemaError("unknown distribution spec \"" + spec +
                      "\" (expected btw:q, nbtw:q, nbtw:q:j, so:t:q1:q2, decouple:...)");
}

Json label_cover_to_json(const LabelCoverInstance& lc) {
    Json edges = Json::array();
    for (const auto& e : lc.edges) {
        Json edge = {{"u", e.u}, {"v", e.v}, {"pi", e.pi}};
        if (e.weight != 1) edge["weight"] = format_rational(e.weight);
        edges.push_back(std::move(edge));
    }
    return {{"L", lc.L}, {"R", lc.R}, {"U", lc.U}, {"V", lc.V}, {"edges", std::move(edges)}};
}

LabelCoverInstance label_cover_from_json(const Json& j) {
    LabelCoverInstance lc;
    lc.L = static_cast<int>(get_int(field(j, "L", ""), "L"));
    lc.R = static_cast<int>(get_int(field(j, "R", ""), "R"));
    lc.U = get_string_array(field(j, "U", ""), "U");
    lc.V = get_string_array(field(j, "V", ""), "V");
    const Json& edges = get_array(field(j, "edges", ""), "edges");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string path = at("edges", i);
        LabelCoverEdge e;
        e.u = static_cast<int>(get_int(field(edges[i], "u", path), join(path, "u")));
        e.v = static_cast<int>(get_int(field(edges[i], "v", path), join(path, "v")));
        for (long long v : get_int_array(field(edges[i], "pi", path), join(path, "pi")))
            e.pi.push_back(static_cast<int>(v));
        if (edges[i].contains("weight"))
            e.weight = get_fraction(edges[i]["weight"], join(path, "weight"));
        lc.edges.push_back(std::move(e));
    }
    try {
        lc.validate();
    } catch (const Error& e) {
        fail("", e.what());
    }
    return lc;
}

Json labeling_to_json(const Labeling& lab) {
    return {{"left", lab.left}, {"right", lab.right}};
}

Labeling labeling_from_json(const Json& j) {
    Labeling lab;
    for (long long v : get_int_array(field(j, "left", ""), "left"))
        lab.left.push_back(static_cast<int>(v));
    for (long long v : get_int_array(field(j, "right", ""), "right"))
        lab.right.push_back(static_cast<int>(v));
    return lab;
}

Json function_to_json(const FiniteFunction<long long>& f) {
    Json factors = Json::array();
    for (int i = 0; i < f.space.dimension(); ++i) {
        const SpaceFactor& fac = f.space.factor(i);
        Json p = Json::array();
        for (const auto& mass : fac.p) p.push_back(format_rational(mass));
        factors.push_back({{"size", fac.size}, {"p", std::move(p)}});
    }
    return {{"factors", std::move(factors)}, {"values", f.values}};
}

FiniteFunction<long long> function_from_json(const Json& j) {
    std::vector<SpaceFactor> factors;
    const Json& arr = get_array(field(j, "factors", ""), "factors");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string path = at("factors", i);
        SpaceFactor fac;
        fac.size = static_cast<int>(get_int(field(arr[i], "size", path), join(path, "size")));
        const Json& p = get_array(field(arr[i], "p", path), join(path, "p"));
        for (std::size_t k = 0; k < p.size(); ++k)
            fac.p.push_back(get_fraction(p[k], at(join(path, "p"), k)));
        factors.push_back(std::move(fac));
    }
    try {
        ProductSpace space{std::move(factors)};
        std::vector<long long> values = get_int_array(field(j, "values", ""), "values");
        if (static_cast<long long>(values.size()) != space.size())
            fail("values", "expected " + std::to_string(space.size()) + " entries, got " +
                               std::to_string(values.size()));
        return FiniteFunction<long long>{std::move(space), std::move(values)};
    } catch (const SchemaError&) {
        throw;
    } catch (const Error& e) {
        fail("factors", e.what());
    }
}

Json assignment_to_json(const Assignment& asg) {
    Json left = Json::object(), right = Json::object();
    for (const auto& [name, table] : asg.left) left[name] = function_to_json(table);
    for (const auto& [name, table] : asg.right) right[name] = function_to_json(table);
    return {{"left", std::move(left)}, {"right", std::move(right)}};
}

Assignment assignment_from_json(const Json& j) {
    Assignment asg;
    for (const char* side : {"left", "right"}) {
        const Json& block = field(j, side, "");
        if (!block.is_object()) fail(side, "expected an object");
        auto& out = side == std::string("left") ? asg.left : asg.right;
        for (const auto& [name, fn] : block.items()) {
            try {
                out.emplace(name, function_from_json(fn));
            } catch (const SchemaError& e) {
                fail(join(side, name.c_str()), e.what());
            }
        }
    }
    return asg;
}

std::string render_json(const Json& j) { return j.dump(2) + "\n"; }

namespace {

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

void flatten(const Json& j, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& out) {
    if (j.is_object()) {
        for (const auto& [key, value] : j.items())
            flatten(value, prefix.empty() ? key : prefix + "." + key, out);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], at(prefix, i), out);
    } else if (j.is_string()) {
        out.emplace_back(prefix, j.get<std::string>());
    } else if (j.is_null()) {
        out.emplace_back(prefix, "");
    } else {
        out.emplace_back(prefix, j.dump());
    }
}

}  // namespace

std::string render_csv(const Json& j) {
    std::vector<std::pair<std::string, std::string>> cells;
    flatten(j, "", cells);
    std::string header, row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) {
            header += ",";
            row += ",";
        }
        header += csv_quote(cells[i].first);
        row += csv_quote(cells[i].second);
    }
    return header + "\n" + row + "\n";
}

}  // namespace ocsp
