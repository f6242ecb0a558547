#pragma once

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "mrparse/graph.hpp"

namespace mrparse {

/// One token of companion (morpho-syntactic) data. Anchors are character
/// spans into the sentence the companion graph was produced from.
struct TokenRow {
    int index = 0;  // 1-based
    std::string form;
    std::string lemma;
    std::string upos;
    std::string xpos;
    Anchor anchor;
    bool operator==(const TokenRow&) const = default;
};

/// Extract token rows from an MRP-format companion graph. Nodes must carry
/// lemma/upos/xpos properties and a single anchor each; the form comes from
/// the node label (or a 'form' property when present). Rows are ordered by
/// anchor start and re-indexed from 1.
inline std::vector<TokenRow> companion_to_rows(const Graph& companion) {
    std::vector<TokenRow> rows;
    rows.reserve(companion.nodes.size());
    for (const auto& n : companion.nodes) {
        TokenRow row;
        std::string at = "companion graph " + companion.id + ", node " + std::to_string(n.id);
        if (const Value* form = n.property("form"))
            row.form = value_string(*form);
        else if (n.label)
            row.form = *n.label;
        else
            throw Error(at + ": no form (label or 'form' property)");
        for (const char* key : {"lemma", "upos", "xpos"}) {
            const Value* v = n.property(key);
            if (!v) throw Error(at + ": missing property '" + std::string(key) + "'");
            std::string s = value_string(*v);
            if (key[0] == 'l')
                row.lemma = s;
            else if (key[0] == 'u')
                row.upos = s;
            else
                row.xpos = s;
        }
        if (n.anchors.size() != 1)
            throw Error(at + ": expected exactly one anchor, found " + std::to_string(n.anchors.size()));
        row.anchor = n.anchors[0];
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(),
              [](const TokenRow& a, const TokenRow& b) { return a.anchor.from < b.anchor.from; });
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].index = static_cast<int>(i + 1);
        if (i > 0 && rows[i].anchor.from < rows[i - 1].anchor.to)
            throw Error("companion graph " + companion.id + ": overlapping token anchors [" +
                        std::to_string(rows[i - 1].anchor.from) + ", " + std::to_string(rows[i - 1].anchor.to) +
                        ") and [" + std::to_string(rows[i].anchor.from) + ", " + std::to_string(rows[i].anchor.to) +
                        ")");
    }
    return rows;
}

/// Emit one CoNLL-U sentence block: 10 tab-separated columns, '_' for the
/// unused ones, anchors carried in MISC as TokenRange=from:to. A sent_id
/// comment is written when provided; the block ends with a blank line.
inline void write_conllu(const std::vector<TokenRow>& rows, std::ostream& out,
                         const std::string& sent_id = std::string()) {
    if (!sent_id.empty()) out << "# sent_id = " << sent_id << '\n';
    for (const auto& r : rows) {
        out << r.index << '\t' << r.form << '\t' << r.lemma << '\t' << r.upos << '\t' << r.xpos
            << "\t_\t_\t_\t_\tTokenRange=" << r.anchor.from << ':' << r.anchor.to << '\n';
    }
    out << '\n';
}

struct ConlluSentence {
    std::string sent_id;
    std::vector<TokenRow> rows;
};

/// Read CoNLL-U sentence blocks back. Only the columns write_conllu populates
/// are interpreted; multiword-token and empty-node lines are rejected.
inline std::vector<ConlluSentence> read_conllu(std::istream& in) {
    std::vector<ConlluSentence> sentences;
    ConlluSentence current;
    bool any = false;
    std::string line;
    std::size_t line_no = 0;
    auto flush = [&] {
        if (any) sentences.push_back(std::move(current));
        current = ConlluSentence{};
        any = false;
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        if (line[0] == '#') {
            auto eq = line.find('=');
            if (line.find("sent_id") != std::string::npos && eq != std::string::npos) {
                std::string v = line.substr(eq + 1);
                v.erase(0, v.find_first_not_of(' '));
                current.sent_id = v;
                any = true;
            }
            continue;
        }
        auto cols = split(line, '\t');
        if (cols.size() != 10)
            throw Error("conllu line " + std::to_string(line_no) + ": expected 10 columns, found " +
                        std::to_string(cols.size()));
        if (cols[0].find('-') != std::string::npos || cols[0].find('.') != std::string::npos)
            throw Error("conllu line " + std::to_string(line_no) + ": range/empty-node ids are not supported");
        TokenRow row;
        row.index = std::stoi(cols[0]);
        row.form = cols[1];
        row.lemma = cols[2];
        row.upos = cols[3];
        row.xpos = cols[4];
        bool have_range = false;
        for (const auto& item : split(cols[9], '|')) {
            if (item.rfind("TokenRange=", 0) == 0) {
                auto parts = split(item.substr(11), ':');
                if (parts.size() != 2)
                    throw Error("conllu line " + std::to_string(line_no) + ": malformed TokenRange");
                row.anchor = {std::stoll(parts[0]), std::stoll(parts[1])};
                have_range = true;
            }
        }
        if (!have_range)
            throw Error("conllu line " + std::to_string(line_no) + ": missing TokenRange in MISC");
        current.rows.push_back(std::move(row));
        any = true;
    }
    flush();
    return sentences;
}

}  // namespace mrparse
