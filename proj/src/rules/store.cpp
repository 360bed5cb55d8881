#include "refine/rules.hpp"

#include <algorithm>
#include <atomic>

namespace refine
{

namespace
{

// Revisions are unique across all stores, so an application can never be
// replayed on a sibling store either.
std::uint64_t fresh_revision()
{
    static std::atomic<std::uint64_t> counter{0};
    return ++counter;
}

} // namespace

std::string status_text(const Status& s)
{
    if (std::holds_alternative<Todo>(s))
        return "todo";
    if (const auto* d = std::get_if<Discharged>(&s))
    {
        std::string out = "discharged by " + d->rule + " (" + d->lemma + ")";
        if (!d->from.empty())
        {
            out += " from";
            for (int id : d->from)
                out += " " + std::to_string(id);
        }
        return out;
    }
    const auto& r = std::get<Residual>(s);
    return "sorry: " + render(r.premise) + " ==> " + render(r.conclusion);
}

ObligationStore::ObligationStore(Design lhs, Design rhs)
{
    obligations_.push_back({0, std::move(lhs), std::move(rhs), Todo{}});
    revision_ = fresh_revision();
}

const Obligation& ObligationStore::at(int id) const
{
    if (id < 0 || id >= next_id())
        throw std::out_of_range("no obligation " + std::to_string(id));
    return obligations_[static_cast<std::size_t>(id)];
}

const Obligation* ObligationStore::find(const Design& lhs, const Design& rhs) const
{
    for (const auto& o : obligations_)
        if (o.lhs == lhs && o.rhs == rhs)
            return &o;
    return nullptr;
}

std::size_t ObligationStore::open_count() const
{
    return static_cast<std::size_t>(
        std::count_if(obligations_.begin(), obligations_.end(), [](const Obligation& o) { return o.todo(); }));
}

std::size_t ObligationStore::residual_count() const
{
    return static_cast<std::size_t>(std::count_if(obligations_.begin(), obligations_.end(), [](const Obligation& o) {
        return std::holds_alternative<Residual>(o.status);
    }));
}

std::string ObligationStore::fingerprint() const
{
    std::vector<std::string> items;
    items.reserve(obligations_.size());
    for (const auto& o : obligations_)
    {
        const char* kind = o.todo() ? "T" : std::holds_alternative<Discharged>(o.status) ? "D" : "S";
        items.push_back(render(o.lhs) + "\x1f" + render(o.rhs) + "\x1f" + kind);
    }
    std::sort(items.begin(), items.end());
    std::string out;
    for (const auto& s : items)
        out += s + "\x1e";
    return out;
}

int ObligationStore::add(Design lhs, Design rhs, Status status)
{
    const int id = next_id();
    obligations_.push_back({id, std::move(lhs), std::move(rhs), std::move(status)});
    revision_ = fresh_revision();
    return id;
}

void ObligationStore::set_status(int id, Status status)
{
    auto& o = obligations_.at(static_cast<std::size_t>(id));
    if (!o.todo())
        throw std::logic_error("obligation " + std::to_string(id) + " is already closed");
    o.status = std::move(status);
    revision_ = fresh_revision();
}

std::string to_string(RuleKind k)
{
    switch (k)
    {
    case RuleKind::Generate:
        return "generate";
    case RuleKind::Discharge:
        return "discharge";
    case RuleKind::Equation:
        return "equation";
    case RuleKind::GenerateDischarge:
        return "generate+discharge";
    }
    return "?";
}

std::vector<Application> match(const Rule& rule, const ObligationStore& store, const RuleContext& ctx)
{
    std::vector<Application> apps = rule.matcher(rule, store, ctx);
    for (auto& a : apps)
    {
        a.rule = &rule;
        a.revision = store.revision();
    }
    return apps;
}

ObligationStore apply(const Application& app, const ObligationStore& store)
{
    if (app.revision != store.revision())
        throw StaleApplication("application of " + (app.rule ? app.rule->name : std::string("?")) +
                               " was computed for another store revision");
    ObligationStore out = store;
    app.effect(out);
    return out;
}

} // namespace refine
