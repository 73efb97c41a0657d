#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <utility>

#include "msq/error.hpp"

namespace msq {

using Count = std::uint64_t;

// Overflow is a hard error; counts multiply in joins and must never wrap.
Count checked_add(Count a, Count b);
Count checked_mul(Count a, Count b);

// Finite multiset with positive counts. Backed by an ordered map so that
// iteration order (and therefore serialization) is canonical.
template <class E>
class Multiset {
public:
    using Map = std::map<E, Count>;
    using const_iterator = typename Map::const_iterator;

    Multiset() = default;

    void add(const E& e, Count n = 1) {
        if (n == 0) return;
        auto [it, inserted] = m_.try_emplace(e, n);
        if (!inserted) it->second = checked_add(it->second, n);
    }

    // Replaces the count; zero removes the element.
    void set(const E& e, Count n) {
        if (n == 0)
            m_.erase(e);
        else
            m_[e] = n;
    }

    Count count(const E& e) const {
        auto it = m_.find(e);
        return it == m_.end() ? 0 : it->second;
    }

    bool contains(const E& e) const { return m_.find(e) != m_.end(); }
    bool empty() const { return m_.empty(); }
    std::size_t distinct() const { return m_.size(); }

    Count total() const {
        Count t = 0;
        for (const auto& [e, n] : m_) t = checked_add(t, n);
        return t;
    }

    const_iterator begin() const { return m_.begin(); }
    const_iterator end() const { return m_.end(); }
    const Map& entries() const { return m_; }

    bool operator==(const Multiset& o) const { return m_ == o.m_; }
    bool operator!=(const Multiset& o) const { return !(m_ == o.m_); }

private:
    Map m_;
};

template <class E>
Count cardinality(const Multiset<E>& m, const E& x) {
    return m.count(x);
}

template <class E>
using ColoredSet = std::set<std::pair<E, Count>>;

template <class E>
ColoredSet<E> coloring(const Multiset<E>& m) {
    ColoredSet<E> out;
    for (const auto& [e, n] : m)
        for (Count i = 1; i <= n; ++i) out.emplace(e, i);
    return out;
}

template <class E>
Multiset<E> uncoloring(const ColoredSet<E>& c) {
    std::map<E, std::set<Count>> colors;
    for (const auto& [e, i] : c) colors[e].insert(i);
    Multiset<E> out;
    for (const auto& [e, cs] : colors) {
        // Colors of one element must be exactly 1..k.
        if (*cs.begin() != 1 || *cs.rbegin() != cs.size())
            throw Error(ErrorKind::MalformedColoring, "colors of an element are not contiguous from 1");
        out.add(e, cs.size());
    }
    return out;
}

template <class E>
Multiset<E> additive_union(const Multiset<E>& a, const Multiset<E>& b) {
    Multiset<E> out = a;
    for (const auto& [e, n] : b) out.add(e, n);
    return out;
}

}  // namespace msq
