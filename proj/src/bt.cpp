#include "stnbt/bt.h"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace stnbt {

const char *bt_kind_name(BtKind kind) {
    switch (kind) {
        case BtKind::Sequence: return "Sequence";
        case BtKind::Parallel: return "Parallel";
        case BtKind::WaitTime: return "WaitTime";
        case BtKind::CheckTime: return "CheckTime";
        case BtKind::WaitAction: return "WaitAction";
        case BtKind::CheckAction: return "CheckAction";
        case BtKind::CheckAtStart: return "CheckAtStart";
        case BtKind::CheckOverall: return "CheckOverall";
        case BtKind::CheckAtEnd: return "CheckAtEnd";
        case BtKind::ApplyAtStart: return "ApplyAtStart";
        case BtKind::ApplyAtEnd: return "ApplyAtEnd";
        case BtKind::ExecuteAction: return "ExecuteAction";
        case BtKind::SuccessLeaf: return "Success";
    }
    return "?";
}

namespace {

int make_node(BehaviorTree &bt, BtKind kind) {
    BtNode node;
    node.id = static_cast<int>(bt.nodes.size());
    node.kind = kind;
    bt.nodes.push_back(std::move(node));
    return bt.nodes.back().id;
}

int make_ref_leaf(BehaviorTree &bt, BtKind kind, const Stn &stn, int target) {
    int id = make_node(bt, kind);
    bt.nodes[id].stn_ref = target;
    bt.nodes[id].signature = stn.nodes[target].signature;
    bt.nodes[id].snap = stn.nodes[target].kind;
    return id;
}

int make_lits_leaf(BehaviorTree &bt, BtKind kind, const StnNode &owner,
                   const LiteralSet &lits) {
    int id = make_node(bt, kind);
    bt.nodes[id].signature = owner.signature;
    bt.nodes[id].snap = owner.kind;
    bt.nodes[id].stn_ref = owner.id;
    bt.nodes[id].literals = lits;
    return id;
}

}  // namespace

int start_unit(BehaviorTree &bt, const Stn &stn, const DistanceMatrix &dm, int node,
               const std::vector<int> &extra_parents) {
    const StnNode &n = stn.nodes[node];
    assert(n.kind == SnapKind::Start);
    int unit = make_node(bt, BtKind::Sequence);
    bt.nodes[unit].stn_ref = node;
    bt.nodes[unit].signature = n.signature;
    bt.nodes[unit].snap = n.kind;
    std::vector<int> kids;

    int wait = make_node(bt, BtKind::WaitTime);
    Millis back = dm.d[node][stn.root];
    bt.nodes[wait].time = back >= kForever ? 0 : -back;
    kids.push_back(wait);
    for (int p : extra_parents) {
        kids.push_back(make_ref_leaf(bt, BtKind::WaitAction, stn, p));
    }
    kids.push_back(make_lits_leaf(bt, BtKind::CheckAtStart, n, n.conds));
    kids.push_back(make_lits_leaf(bt, BtKind::ApplyAtStart, n, n.effs));
    int exec = make_ref_leaf(bt, BtKind::ExecuteAction, stn, node);
    bt.nodes[exec].planned_duration = n.duration;
    bt.action_index[node] = exec;
    kids.push_back(exec);

    bt.nodes[unit].children = std::move(kids);
    return unit;
}

// The join leaf comes first: the end of a running action cannot be delayed,
// so every end-side constraint is evaluated at the moment the performer
// reports completion.
int end_unit(BehaviorTree &bt, const Stn &stn, const DistanceMatrix &dm, int node,
             const std::vector<int> &extra_parents) {
    const StnNode &n = stn.nodes[node];
    assert(n.kind == SnapKind::End);
    int unit = make_node(bt, BtKind::Sequence);
    bt.nodes[unit].stn_ref = node;
    bt.nodes[unit].signature = n.signature;
    bt.nodes[unit].snap = n.kind;
    std::vector<int> kids;

    int exec = make_ref_leaf(bt, BtKind::ExecuteAction, stn, node);
    bt.action_index[node] = exec;
    kids.push_back(exec);
    for (int p : extra_parents) {
        kids.push_back(make_ref_leaf(bt, BtKind::CheckAction, stn, p));
    }
    if (dm.d[stn.root][node] < kForever) {
        int check = make_node(bt, BtKind::CheckTime);
        bt.nodes[check].time = dm.d[stn.root][node];
        kids.push_back(check);
    }
    if (!n.overall.empty()) {
        kids.push_back(make_lits_leaf(bt, BtKind::CheckOverall, n, n.overall));
    }
    kids.push_back(make_lits_leaf(bt, BtKind::CheckAtEnd, n, n.conds));
    kids.push_back(make_lits_leaf(bt, BtKind::ApplyAtEnd, n, n.effs));

    bt.nodes[unit].children = std::move(kids);
    return unit;
}

namespace {

int goal_unit(BehaviorTree &bt, const Stn &stn, int node,
              const std::vector<int> &extra_parents) {
    const StnNode &n = stn.nodes[node];
    if (extra_parents.empty() && n.conds.empty()) {
        int leaf = make_node(bt, BtKind::SuccessLeaf);
        bt.nodes[leaf].stn_ref = node;
        bt.action_index[node] = leaf;
        return leaf;
    }
    int unit = make_node(bt, BtKind::Sequence);
    bt.nodes[unit].stn_ref = node;
    bt.nodes[unit].signature = "<goal>";
    bt.nodes[unit].snap = SnapKind::Goal;
    std::vector<int> kids;
    for (int p : extra_parents) {
        kids.push_back(make_ref_leaf(bt, BtKind::WaitAction, stn, p));
    }
    int check = make_lits_leaf(bt, BtKind::CheckAtEnd, n, n.conds);
    bt.action_index[node] = check;
    kids.push_back(check);
    bt.nodes[unit].children = std::move(kids);
    return unit;
}

struct Builder {
    const Stn &stn;
    const DistanceMatrix &dm;
    BehaviorTree bt;
    std::vector<bool> used;

    explicit Builder(const Stn &s, const DistanceMatrix &d)
        : stn(s), dm(d), used(s.nodes.size(), false) {}

    int end_of(int start_node) const {
        for (const auto &l : stn.nodes[start_node].out_links) {
            if (l.duration) return l.peer;
        }
        return -1;
    }

    std::vector<int> extra_parents(int node, int tree_parent) const {
        std::vector<int> out;
        for (const auto &l : stn.nodes[node].in_links) {
            if (l.peer == tree_parent) continue;
            // The root link's bounds are already carried by WaitTime/CheckTime.
            if (l.peer == stn.root) continue;
            out.push_back(l.peer);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    // Depth-first expansion of one STN node arriving over the link from
    // `tree_parent`. Revisits and forward references to an end whose start
    // has not run yet both collapse to a WaitAction leaf.
    int flow(int node, int tree_parent) {
        const StnNode &n = stn.nodes[node];
        if (used[node]) {
            return make_ref_leaf(bt, BtKind::WaitAction, stn, node);
        }
        if (n.kind == SnapKind::End) {
            int start = -1;
            for (size_t i = 0; i < stn.end_node_of.size(); ++i) {
                if (stn.end_node_of[i] == node) start = stn.start_node_of[i];
            }
            if (start >= 0 && !used[start]) {
                return make_ref_leaf(bt, BtKind::WaitAction, stn, node);
            }
        }
        used[node] = true;

        if (n.kind == SnapKind::Goal) {
            return goal_unit(bt, stn, node, extra_parents(node, tree_parent));
        }

        int unit = -1;
        if (n.kind == SnapKind::Start) {
            unit = start_unit(bt, stn, dm, node, extra_parents(node, tree_parent));
        } else if (n.kind == SnapKind::End) {
            unit = end_unit(bt, stn, dm, node, extra_parents(node, tree_parent));
        }

        std::vector<int> out_children;
        for (const auto &l : n.out_links) out_children.push_back(l.peer);
        std::sort(out_children.begin(), out_children.end());
        if (n.kind == SnapKind::Start) {
            int e = end_of(node);
            auto it = std::find(out_children.begin(), out_children.end(), e);
            assert(it != out_children.end());
            out_children.erase(it);
            out_children.insert(out_children.begin(), e);
        }

        std::vector<int> sub;
        for (int c : out_children) sub.push_back(flow(c, node));

        if (n.kind == SnapKind::Init) {
            if (sub.empty()) return make_node(bt, BtKind::SuccessLeaf);
            if (sub.size() == 1) return sub[0];
            int par = make_node(bt, BtKind::Parallel);
            bt.nodes[par].children = std::move(sub);
            return par;
        }

        if (sub.empty()) return unit;
        int body;
        if (sub.size() == 1) {
            body = sub[0];
        } else {
            body = make_node(bt, BtKind::Parallel);
            bt.nodes[body].children = std::move(sub);
        }
        int seq = make_node(bt, BtKind::Sequence);
        bt.nodes[seq].children = {unit, body};
        return seq;
    }
};

}  // namespace

namespace {

void preorder(const BehaviorTree &bt, int id, std::vector<int> &order) {
    order.push_back(id);
    for (int c : bt.nodes[id].children) preorder(bt, c, order);
}

// Canonical document-order ids keep exports stable and round-trippable.
void renumber(BehaviorTree &bt) {
    if (bt.root < 0) return;
    std::vector<int> order;
    preorder(bt, bt.root, order);
    std::vector<int> remap(bt.nodes.size(), -1);
    for (size_t i = 0; i < order.size(); ++i) remap[order[i]] = static_cast<int>(i);
    std::vector<BtNode> nodes(order.size());
    for (int old_id : order) {
        BtNode node = bt.nodes[old_id];
        node.id = remap[old_id];
        for (int &c : node.children) c = remap[c];
        nodes[node.id] = std::move(node);
    }
    bt.nodes = std::move(nodes);
    bt.root = remap[bt.root];
    for (auto &[stn_ref, site] : bt.action_index) site = remap[site];
}

}  // namespace

BehaviorTree build_bt(const Stn &stn, const DistanceMatrix &dm) {
    Builder builder(stn, dm);
    builder.bt.root = builder.flow(stn.root, -1);
    renumber(builder.bt);
    return std::move(builder.bt);
}

namespace {

void escape_attr(std::ostream &out, const std::string &value) {
    for (char c : value) {
        if (c == '"') {
            out << "&quot;";
        } else if (c == '&') {
            out << "&amp;";
        } else if (c == '<') {
            out << "&lt;";
        } else if (c == '>') {
            out << "&gt;";
        } else {
            out << c;
        }
    }
}

std::string lits_attr(const LiteralSet &lits) {
    std::string out;
    for (const auto &l : lits) {
        if (!out.empty()) out += " ";
        out += l.str();
    }
    return out;
}

void export_node(std::ostream &out, const BehaviorTree &bt, int id, int depth) {
    const BtNode &n = bt.nodes[id];
    std::string indent(static_cast<size_t>(depth) * 2, ' ');
    out << indent << "<" << bt_kind_name(n.kind) << " id=\"" << n.id << "\"";
    switch (n.kind) {
        case BtKind::Sequence:
        case BtKind::Parallel:
            if (n.stn_ref >= 0) {
                out << " node=\"" << n.stn_ref << "\" action=\"";
                escape_attr(out, n.signature);
                out << "\" snap=\"" << snap_kind_name(n.snap) << "\"";
            }
            break;
        case BtKind::WaitTime:
        case BtKind::CheckTime:
            out << " ms=\"" << n.time << "\"";
            break;
        case BtKind::WaitAction:
        case BtKind::CheckAction:
            out << " node=\"" << n.stn_ref << "\" action=\"";
            escape_attr(out, n.signature);
            out << "\" snap=\"" << snap_kind_name(n.snap) << "\"";
            break;
        case BtKind::ExecuteAction:
            out << " node=\"" << n.stn_ref << "\" action=\"";
            escape_attr(out, n.signature);
            out << "\" snap=\"" << snap_kind_name(n.snap) << "\" duration=\""
                << n.planned_duration << "\"";
            break;
        case BtKind::CheckAtStart:
        case BtKind::CheckOverall:
        case BtKind::CheckAtEnd:
        case BtKind::ApplyAtStart:
        case BtKind::ApplyAtEnd:
            out << " node=\"" << n.stn_ref << "\" action=\"";
            escape_attr(out, n.signature);
            out << "\" lits=\"";
            escape_attr(out, lits_attr(n.literals));
            out << "\"";
            break;
        case BtKind::SuccessLeaf:
            if (n.stn_ref >= 0) out << " node=\"" << n.stn_ref << "\"";
            break;
    }
    if (n.children.empty()) {
        out << "/>\n";
        return;
    }
    out << ">\n";
    for (int c : n.children) export_node(out, bt, c, depth + 1);
    out << indent << "</" << bt_kind_name(n.kind) << ">\n";
}

}  // namespace

std::string export_bt_xml(const BehaviorTree &bt) {
    std::ostringstream out;
    out << "<BehaviorTree>\n";
    if (bt.root >= 0) export_node(out, bt, bt.root, 1);
    out << "</BehaviorTree>\n";
    return out.str();
}

std::string export_bt_dot(const BehaviorTree &bt) {
    std::ostringstream out;
    out << "digraph bt {\n  node [shape=box];\n";
    for (const auto &n : bt.nodes) {
        out << "  b" << n.id << " [label=\"" << bt_kind_name(n.kind);
        if (!n.signature.empty()) {
            out << "\\n" << n.signature << ":" << snap_kind_name(n.snap);
        }
        if (n.kind == BtKind::WaitTime || n.kind == BtKind::CheckTime) {
            out << "\\n" << n.time << "ms";
        }
        out << "\"];\n";
    }
    for (const auto &n : bt.nodes) {
        for (int c : n.children) out << "  b" << n.id << " -> b" << c << ";\n";
    }
    out << "}\n";
    return out.str();
}

namespace {

struct XmlTag {
    std::string name;
    std::map<std::string, std::string> attrs;
    bool self_closing = false;
    bool closing = false;
};

class XmlReader {
public:
    explicit XmlReader(const std::string &text) : text_(text) {}

    bool next(XmlTag &tag) {
        size_t open = text_.find('<', pos_);
        if (open == std::string::npos) return false;
        size_t close = text_.find('>', open);
        if (close == std::string::npos) throw std::runtime_error("unterminated tag");
        std::string body = text_.substr(open + 1, close - open - 1);
        pos_ = close + 1;
        tag = XmlTag{};
        if (!body.empty() && body[0] == '/') {
            tag.closing = true;
            tag.name = body.substr(1);
            return true;
        }
        if (!body.empty() && body.back() == '/') {
            tag.self_closing = true;
            body.pop_back();
        }
        size_t i = 0;
        while (i < body.size() && !std::isspace(static_cast<unsigned char>(body[i]))) ++i;
        tag.name = body.substr(0, i);
        while (i < body.size()) {
            while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
            if (i >= body.size()) break;
            size_t eq = body.find('=', i);
            if (eq == std::string::npos) throw std::runtime_error("malformed attribute");
            std::string key = body.substr(i, eq - i);
            if (eq + 1 >= body.size() || body[eq + 1] != '"') {
                throw std::runtime_error("expected quoted attribute value");
            }
            size_t end = body.find('"', eq + 2);
            if (end == std::string::npos) throw std::runtime_error("unterminated attribute");
            tag.attrs[key] = unescape(body.substr(eq + 2, end - eq - 2));
            i = end + 1;
        }
        return true;
    }

private:
    static std::string unescape(const std::string &v) {
        std::string out;
        for (size_t i = 0; i < v.size(); ++i) {
            if (v[i] != '&') {
                out += v[i];
                continue;
            }
            if (v.compare(i, 6, "&quot;") == 0) { out += '"'; i += 5; }
            else if (v.compare(i, 5, "&amp;") == 0) { out += '&'; i += 4; }
            else if (v.compare(i, 4, "&lt;") == 0) { out += '<'; i += 3; }
            else if (v.compare(i, 4, "&gt;") == 0) { out += '>'; i += 3; }
            else out += v[i];
        }
        return out;
    }

    const std::string &text_;
    size_t pos_ = 0;
};

BtKind kind_from_name(const std::string &name) {
    for (BtKind k : {BtKind::Sequence, BtKind::Parallel, BtKind::WaitTime,
                     BtKind::CheckTime, BtKind::WaitAction, BtKind::CheckAction,
                     BtKind::CheckAtStart, BtKind::CheckOverall, BtKind::CheckAtEnd,
                     BtKind::ApplyAtStart, BtKind::ApplyAtEnd, BtKind::ExecuteAction,
                     BtKind::SuccessLeaf}) {
        if (name == bt_kind_name(k)) return k;
    }
    throw std::runtime_error("unknown BT node kind: " + name);
}

SnapKind snap_from_name(const std::string &name) {
    if (name == "init") return SnapKind::Init;
    if (name == "end") return SnapKind::End;
    if (name == "goal") return SnapKind::Goal;
    return SnapKind::Start;
}

LiteralSet lits_from_attr(const std::string &text) {
    LiteralSet out;
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && text[i] == ' ') ++i;
        if (i >= text.size()) break;
        if (text[i] != '(') throw std::runtime_error("malformed literal list");
        int depth = 0;
        size_t start = i;
        while (i < text.size()) {
            if (text[i] == '(') ++depth;
            if (text[i] == ')') {
                --depth;
                if (depth == 0) { ++i; break; }
            }
            ++i;
        }
        std::string one = text.substr(start, i - start);
        Literal lit;
        if (one.rfind("(not ", 0) == 0) {
            lit.positive = false;
            one = one.substr(5, one.size() - 6);
        }
        std::istringstream in(one.substr(1, one.size() - 2));
        in >> lit.fluent.name;
        std::string arg;
        while (in >> arg) lit.fluent.args.push_back(arg);
        out.insert(lit);
    }
    return out;
}

}  // namespace

BehaviorTree parse_bt_xml(const std::string &text) {
    XmlReader reader(text);
    BehaviorTree bt;
    XmlTag tag;
    if (!reader.next(tag) || tag.name != "BehaviorTree") {
        throw std::runtime_error("expected <BehaviorTree> document");
    }
    std::vector<int> stack;  // open element ids
    while (reader.next(tag)) {
        if (tag.closing) {
            if (tag.name == "BehaviorTree") break;
            if (stack.empty()) throw std::runtime_error("unbalanced closing tag");
            stack.pop_back();
            continue;
        }
        BtNode node;
        node.id = static_cast<int>(bt.nodes.size());
        node.kind = kind_from_name(tag.name);
        auto get = [&](const char *key) -> std::string {
            auto it = tag.attrs.find(key);
            return it == tag.attrs.end() ? std::string{} : it->second;
        };
        if (!get("node").empty()) node.stn_ref = std::stoi(get("node"));
        if (!get("action").empty()) node.signature = get("action");
        if (!get("snap").empty()) node.snap = snap_from_name(get("snap"));
        if (!get("ms").empty()) node.time = std::stoll(get("ms"));
        if (!get("duration").empty()) node.planned_duration = std::stoll(get("duration"));
        if (tag.attrs.count("lits")) node.literals = lits_from_attr(tag.attrs["lits"]);
        bt.nodes.push_back(node);
        int id = node.id;
        if (!stack.empty()) {
            bt.nodes[stack.back()].children.push_back(id);
        } else {
            bt.root = id;
        }
        if (node.kind == BtKind::ExecuteAction ||
            (node.kind == BtKind::SuccessLeaf && node.stn_ref >= 0)) {
            bt.action_index[node.stn_ref] = id;
        }
        if (!tag.self_closing) stack.push_back(id);
    }
    return bt;
}

}  // namespace stnbt
