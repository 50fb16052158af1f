#ifndef FOURFOLD_CONSTRUCTION_HPP
#define FOURFOLD_CONSTRUCTION_HPP

#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>


namespace fourfold {

enum class StandardPiece { s2xs2, cp2, cp2bar, s4 };

inline std::string_view standard_piece_name(StandardPiece p)
{
    switch (p) {
        case StandardPiece::s2xs2: return "S2xS2";
        case StandardPiece::cp2: return "CP2";
        case StandardPiece::cp2bar: return "CP2bar";
        case StandardPiece::s4: return "S4";
    }
    return "S4";
}

struct ConstructionTree;
using TreePtr = std::shared_ptr<const ConstructionTree>;

/// Provenance record for a model; re-evaluating the tree reproduces the model.
struct ConstructionTree {
    enum class Kind { elliptic, standard, log_transform, connected_sum, fiber_sum, rewrite };

    Kind kind = Kind::standard;
    int n = 0;                                    // elliptic
    StandardPiece piece = StandardPiece::s4;      // standard
    int nucleus = 0;                              // log_transform
    long long multiplicity = 0;                   // log_transform
    int nucleus_left = 0, nucleus_right = 0;      // fiber_sum
    std::string rule;                             // rewrite
    std::vector<TreePtr> children;

    static TreePtr elliptic(int n)
    {
        auto t = std::make_shared<ConstructionTree>();
        t->kind = Kind::elliptic;
        t->n = n;
        return t;
    }

    static TreePtr standard(StandardPiece p)
    {
        auto t = std::make_shared<ConstructionTree>();
        t->kind = Kind::standard;
        t->piece = p;
        return t;
    }

    static TreePtr log_transform(TreePtr child, int nucleus, long long p)
    {
        auto t = std::make_shared<ConstructionTree>();
        t->kind = Kind::log_transform;
        t->nucleus = nucleus;
        t->multiplicity = p;
        t->children = {std::move(child)};
        return t;
    }

    static TreePtr connected_sum(std::vector<TreePtr> children)
    {
        auto t = std::make_shared<ConstructionTree>();
        t->kind = Kind::connected_sum;
        t->children = std::move(children);
        return t;
    }

    static TreePtr fiber_sum(TreePtr left, TreePtr right, int nl, int nr)
    {
        auto t = std::make_shared<ConstructionTree>();
        t->kind = Kind::fiber_sum;
        t->nucleus_left = nl;
        t->nucleus_right = nr;
        t->children = {std::move(left), std::move(right)};
        return t;
    }

    static TreePtr rewrite(TreePtr child, std::string rule)
    {
        auto t = std::make_shared<ConstructionTree>();
        t->kind = Kind::rewrite;
        t->rule = std::move(rule);
        t->children = {std::move(child)};
        return t;
    }
};

inline void tree_to_text(const ConstructionTree& t, std::ostringstream& os)
{
    using Kind = ConstructionTree::Kind;
    switch (t.kind) {
        case Kind::elliptic:
            os << "E(" << t.n << ")";
            break;
        case Kind::standard:
            os << standard_piece_name(t.piece);
            break;
        case Kind::log_transform:
            os << "logt(";
            tree_to_text(*t.children.at(0), os);
            os << "," << t.nucleus << "," << t.multiplicity << ")";
            break;
        case Kind::connected_sum:
            os << "csum(";
            for (size_t i = 0; i < t.children.size(); ++i) {
                if (i) os << ",";
                tree_to_text(*t.children[i], os);
            }
            os << ")";
            break;
        case Kind::fiber_sum:
            os << "fsum(";
            tree_to_text(*t.children.at(0), os);
            os << ",";
            tree_to_text(*t.children.at(1), os);
            os << "," << t.nucleus_left << "," << t.nucleus_right << ")";
            break;
        case Kind::rewrite:
            os << "rw[" << t.rule << "](";
            tree_to_text(*t.children.at(0), os);
            os << ")";
            break;
    }
}

inline std::string tree_to_text(const TreePtr& t)
{
    if (!t) return "?";
    std::ostringstream os;
    tree_to_text(*t, os);
    return os.str();
}

} // namespace fourfold

#endif
