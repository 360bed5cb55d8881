#include "refine/certify.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace refine
{

ProofDag extract(const ObligationStore& final_store)
{
    if (!final_store.root_done())
        throw CertifyError("the root obligation is not closed");
    ProofDag dag;
    dag.root = final_store.root_id();
    dag.store = final_store;
    std::set<int> seen;
    std::vector<int> stack{dag.root};
    while (!stack.empty())
    {
        const int id = stack.back();
        stack.pop_back();
        if (!seen.insert(id).second)
            continue;
        const Obligation& o = final_store.at(id);
        if (o.todo())
            throw CertifyError("obligation " + std::to_string(id) + " is still open");
        if (const auto* d = std::get_if<Discharged>(&o.status))
            for (int f : d->from)
                stack.push_back(f);
    }
    dag.nodes.assign(seen.begin(), seen.end());
    return dag;
}

namespace
{

// A vertex of the witness tree: an obligation, or the i-th side fact of one.
struct Item
{
    int obligation;
    int side = -1;
};

struct Builder
{
    const ObligationStore& store;
    std::map<int, int> size_memo;

    const Discharged* discharged(int id) const { return std::get_if<Discharged>(&store.at(id).status); }

    int subtree_size(int id)
    {
        if (auto it = size_memo.find(id); it != size_memo.end())
            return it->second;
        size_memo[id] = 1; // guards against cycles
        int n = 1;
        if (const auto* d = discharged(id))
        {
            for (int f : d->from)
                n += subtree_size(f);
            n += static_cast<int>(d->side.size());
        }
        size_memo[id] = n;
        return n;
    }

    // premises, smallest subtree first (stable), then side facts
    std::vector<Item> children(int id)
    {
        std::vector<Item> out;
        const auto* d = discharged(id);
        if (!d)
            return out;
        std::vector<int> from = d->from;
        std::stable_sort(from.begin(), from.end(),
                         [&](int a, int b) { return subtree_size(a) < subtree_size(b); });
        for (int f : from)
            out.push_back({f, -1});
        for (std::size_t i = 0; i < d->side.size(); ++i)
            out.push_back({id, static_cast<int>(i)});
        return out;
    }
};

std::string letter_name(std::size_t i)
{
    std::string name = "?";
    name += static_cast<char>('A' + i % 26);
    if (i >= 26)
        name += std::to_string(i / 26);
    return name;
}

class Abbreviations
{
public:
    explicit Abbreviations(const std::vector<std::pair<std::string, Design>>& list) : list_(list) {}

    const std::string* name_of(const Design& d) const
    {
        for (const auto& [n, x] : list_)
            if (x == d)
                return &n;
        return nullptr;
    }

    // ?X, ?X ; ?Y, or the design text in parentheses
    std::string term(const Design& d) const
    {
        if (const auto* n = name_of(d))
            return *n;
        if (const auto* s = d.as<Seq>())
            if (name_of(*s->first) && name_of(*s->second))
                return *name_of(*s->first) + " ; " + *name_of(*s->second);
        return "(" + render(d) + ")";
    }

    std::string argument(const Design& d) const
    {
        const std::string t = term(d);
        return t.find(' ') == std::string::npos ? t : "\"" + t + "\"";
    }

private:
    const std::vector<std::pair<std::string, Design>>& list_;
};

std::vector<const Design*> sides(const WitnessFact& f)
{
    if (f.kind == WitnessFact::Kind::Monotonic)
        return {&f.lhs};
    return {&f.lhs, &f.rhs};
}

void choose_abbreviations(ProofWitness& w)
{
    std::map<std::string, int> count; // keyed by rendering
    auto bump = [&](const Design& d) { ++count[render(d)]; };
    for (const auto& f : w.facts)
        for (const Design* d : sides(f))
        {
            bump(*d);
            if (const auto* s = d->as<Seq>())
            {
                bump(*s->first);
                bump(*s->second);
            }
        }

    auto named = [&](const Design& d) {
        return std::any_of(w.abbreviations.begin(), w.abbreviations.end(),
                           [&](const auto& a) { return a.second == d; });
    };
    std::function<void(const Design&)> visit = [&](const Design& d) {
        if (named(d))
            return;
        const auto* s = d.as<Seq>();
        if (s && named(*s->first) && named(*s->second))
            return;
        if (count[render(d)] >= 2)
        {
            w.abbreviations.emplace_back(letter_name(w.abbreviations.size()), d);
            return;
        }
        if (s)
        {
            visit(*s->first);
            visit(*s->second);
        }
    };
    for (const auto& f : w.facts)
        for (const Design* d : sides(f))
            visit(*d);
}

} // namespace

ProofWitness emit_witness(const ProofDag& dag, const std::string& task_name, const std::vector<std::string>& trace)
{
    const ObligationStore& store = dag.store;
    Builder b{store, {}};
    ProofWitness w;
    w.task = task_name;
    w.goal_lhs = store.at(dag.root).lhs;
    w.goal_rhs = store.at(dag.root).rhs;
    w.trace = trace;

    // names: facts numbered in pre-order, sorries counted separately
    std::map<std::pair<int, int>, std::string> names;
    int next_fact = 0;
    int next_sorry = 0;
    std::function<void(Item)> number = [&](Item it) {
        const auto key = std::make_pair(it.obligation, it.side);
        if (names.count(key))
            return;
        if (it.side < 0 && std::holds_alternative<Residual>(store.at(it.obligation).status))
        {
            names[key] = "sorry_" + std::to_string(++next_sorry);
            return;
        }
        names[key] = "f" + std::to_string(next_fact++);
        if (it.side < 0)
            for (const Item& c : b.children(it.obligation))
                number(c);
    };
    number({dag.root, -1});

    // emission: dependencies first, later-numbered siblings first
    std::set<std::pair<int, int>> emitted;
    std::function<void(Item)> emit = [&](Item it) {
        const auto key = std::make_pair(it.obligation, it.side);
        if (!emitted.insert(key).second)
            return;
        const Obligation& o = store.at(it.obligation);
        if (it.side >= 0)
        {
            const SideFact& s = std::get<Discharged>(o.status).side[static_cast<std::size_t>(it.side)];
            WitnessFact f;
            f.name = names.at(key);
            f.kind = WitnessFact::Kind::Monotonic;
            f.lhs = s.subject;
            f.rhs = skip();
            f.lemma = s.lemma;
            w.facts.push_back(std::move(f));
            return;
        }
        if (const auto* r = std::get_if<Residual>(&o.status))
        {
            w.sorries.push_back({names.at(key), r->premise, r->conclusion, o.id});
            return;
        }
        auto kids = b.children(it.obligation);
        for (auto k = kids.rbegin(); k != kids.rend(); ++k)
            emit(*k);
        const auto& d = std::get<Discharged>(o.status);
        WitnessFact f;
        f.name = names.at(key);
        f.lhs = o.lhs;
        f.rhs = o.rhs;
        f.lemma = d.lemma;
        f.rule = d.rule;
        f.inst = d.inst;
        f.obligation = o.id;
        for (int id : d.from)
            f.from.push_back(names.at({id, -1}));
        for (std::size_t i = 0; i < d.side.size(); ++i)
            f.from.push_back(names.at({o.id, static_cast<int>(i)}));
        if (d.lemma == "ref_transitive" && d.from.size() == 2)
            f.of = {o.lhs, store.at(d.from[0]).rhs, o.rhs};
        w.facts.push_back(std::move(f));
    };
    emit({dag.root, -1});

    choose_abbreviations(w);
    return w;
}

namespace
{

std::string join(const std::vector<std::string>& items, const std::string& sep)
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i)
        out += (i ? sep : "") + items[i];
    return out;
}

std::string statement(const WitnessFact& f, const Abbreviations& ab)
{
    if (f.kind == WitnessFact::Kind::Monotonic)
        return "monotonic " + ab.term(f.lhs);
    return ab.term(f.lhs) + " ref " + ab.term(f.rhs);
}

std::string render_isar(const ProofWitness& w)
{
    const Abbreviations ab(w.abbreviations);
    std::ostringstream os;
    os << "(* Proof witness for " << w.task << ", built from a rewrite trace of " << w.trace.size()
       << (w.trace.size() == 1 ? " step" : " steps") << ".\n   It cites lemmas of the refinement library and was not checked by a prover. *)\n\n";
    for (const auto& s : w.sorries)
        os << "lemma " << s.name << ": \"" << render(s.premise) << " implies " << render(s.conclusion)
           << "\"\n  sorry\n\n";
    os << "lemma " << w.task << ":\n  \"" << render(w.goal_lhs) << " ref " << render(w.goal_rhs) << "\"\n";
    os << "proof -\n";
    std::set<std::string> declared;
    for (const auto& f : w.facts)
    {
        // let-bind abbreviations right before their first use
        std::vector<const Design*> used = sides(f);
        for (const auto& d : f.of)
            used.push_back(&d);
        for (const Design* d : used)
        {
            std::vector<const Design*> parts{d};
            if (const auto* s = d->as<Seq>(); s && !ab.name_of(*d))
                parts = {&*s->first, &*s->second};
            for (const Design* p : parts)
                if (const auto* n = ab.name_of(*p); n && declared.insert(*n).second)
                    os << "  let " << *n << " = \"" << render(*p) << "\"\n";
        }

        os << "  ";
        if (!f.from.empty())
            os << "from " << join(f.from, " ") << " ";
        os << "have " << f.name << ": \"" << statement(f, ab) << "\"";
        if (!f.inst.empty())
            os << "\n    by (insert " << f.lemma << " [of " << join(f.inst, " ") << "], simp)\n";
        else if (!f.of.empty())
        {
            std::vector<std::string> args;
            for (const auto& d : f.of)
                args.push_back(ab.argument(d));
            os << "\n    by (simp add:" << f.lemma << " [of " << join(args, " ") << "])\n";
        }
        else
            os << " by (simp add:" << f.lemma << ")\n";
    }
    os << "  from " << (w.facts.empty() ? std::string("?") : w.facts.back().name) << " show ?thesis by simp\n";
    os << "qed\n";
    return os.str();
}

std::string or_dash(const std::string& s) { return s.empty() ? "-" : s; }

std::string render_plain(const ProofWitness& w)
{
    std::ostringstream os;
    os << "# proof witness, tab separated\n";
    os << "task\t" << w.task << '\n';
    os << "goal\t" << render(w.goal_lhs) << '\t' << render(w.goal_rhs) << '\n';
    for (const auto& s : w.trace)
        os << "step\t" << s << '\n';
    for (const auto& [n, d] : w.abbreviations)
        os << "abbrev\t" << n << '\t' << render(d) << '\n';
    for (const auto& s : w.sorries)
        os << "sorry\t" << s.name << '\t' << s.obligation << '\t' << render(s.premise) << '\t'
           << render(s.conclusion) << '\n';
    for (const auto& f : w.facts)
    {
        const bool mono = f.kind == WitnessFact::Kind::Monotonic;
        os << "fact\t" << f.name << '\t' << (mono ? "monotonic" : "refines") << '\t' << f.obligation << '\t'
           << f.lemma << '\t' << or_dash(f.rule) << '\t' << or_dash(join(f.from, ",")) << '\t'
           << or_dash(join(f.inst, ",")) << '\t' << render(f.lhs) << '\t' << (mono ? "-" : render(f.rhs));
        for (const auto& d : f.of)
            os << '\t' << render(d);
        os << '\n';
    }
    return os.str();
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s)
    {
        if (c == sep)
        {
            out.push_back(cur);
            cur.clear();
        }
        else
            cur += c;
    }
    out.push_back(cur);
    return out;
}

std::vector<std::string> list_field(const std::string& s)
{
    if (s == "-")
        return {};
    return split(s, ',');
}

} // namespace

std::string render_script(const ProofWitness& w, Dialect dialect)
{
    return dialect == Dialect::IsarLike ? render_isar(w) : render_plain(w);
}

ProofWitness parse_plain(const std::string& text)
{
    ProofWitness w;
    std::istringstream in(text);
    int line_no = 0;
    for (std::string line; std::getline(in, line);)
    {
        ++line_no;
        if (line.empty() || line[0] == '#')
            continue;
        const auto f = split(line, '\t');
        auto need = [&](std::size_t n) {
            if (f.size() < n)
                throw CertifyError("witness line " + std::to_string(line_no) + ": expected " + std::to_string(n) +
                                   " fields");
        };
        try
        {
            if (f[0] == "task")
            {
                need(2);
                w.task = f[1];
            }
            else if (f[0] == "goal")
            {
                need(3);
                w.goal_lhs = parse_design(f[1]);
                w.goal_rhs = parse_design(f[2]);
            }
            else if (f[0] == "step")
            {
                need(2);
                w.trace.push_back(f[1]);
            }
            else if (f[0] == "abbrev")
            {
                need(3);
                w.abbreviations.emplace_back(f[1], parse_design(f[2]));
            }
            else if (f[0] == "sorry")
            {
                need(5);
                w.sorries.push_back({f[1], parse_postrel(f[3]), parse_postrel(f[4]), std::stoi(f[2])});
            }
            else if (f[0] == "fact")
            {
                need(10);
                WitnessFact fact;
                fact.name = f[1];
                if (f[2] != "refines" && f[2] != "monotonic")
                    throw CertifyError("witness line " + std::to_string(line_no) + ": unknown fact kind " + f[2]);
                fact.kind = f[2] == "monotonic" ? WitnessFact::Kind::Monotonic : WitnessFact::Kind::Refines;
                fact.obligation = std::stoi(f[3]);
                fact.lemma = f[4];
                fact.rule = f[5] == "-" ? "" : f[5];
                fact.from = list_field(f[6]);
                fact.inst = list_field(f[7]);
                fact.lhs = parse_design(f[8]);
                fact.rhs = f[9] == "-" ? skip() : parse_design(f[9]);
                for (std::size_t i = 10; i < f.size(); ++i)
                    fact.of.push_back(parse_design(f[i]));
                w.facts.push_back(std::move(fact));
            }
            else
                throw CertifyError("witness line " + std::to_string(line_no) + ": unknown record " + f[0]);
        }
        catch (const ParseError& e)
        {
            throw CertifyError("witness line " + std::to_string(line_no) + ": " + e.what());
        }
        catch (const std::logic_error& e) // stoi
        {
            throw CertifyError("witness line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return w;
}

} // namespace refine
