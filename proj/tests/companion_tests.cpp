#include "test_support.hpp"

using namespace ts;

namespace {

Graph fox_companion() {
    auto graphs = read_mrp_file("data/fixtures/fox_companion.mrp");
    REQUIRE(graphs.size() == 1);
    return graphs[0];
}

}  // namespace

TEST_CASE("companion_to_rows extracts ordered token rows") {
    auto rows = companion_to_rows(fox_companion());
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].form == "The");
    CHECK(rows[1].form == "fox");
    CHECK(rows[2].form == "gazed");
    CHECK(rows[0].index == 1);
    CHECK(rows[2].index == 3);
    CHECK(rows[0].lemma == "the");
    CHECK(rows[2].upos == "VERB");
    CHECK(rows[2].anchor == Anchor{8, 13});
}

TEST_CASE("companion_to_rows orders rows by anchor start") {
    Graph g = fox_companion();
    std::swap(g.nodes[0], g.nodes[2]);
    auto rows = companion_to_rows(g);
    CHECK(rows[0].form == "The");
    CHECK(rows[2].form == "gazed");
}

TEST_CASE("companion_to_rows on an empty companion graph is empty") {
    Graph g;
    g.id = "empty";
    CHECK(companion_to_rows(g).empty());
}

TEST_CASE("companion_to_rows rejects a node without upos") {
    Graph g = fox_companion();
    g.nodes[1].properties.erase(g.nodes[1].properties.begin() + 1);  // drop upos
    try {
        companion_to_rows(g);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("upos") != std::string::npos);
        CHECK(std::string(e.what()).find("node 1") != std::string::npos);
    }
}

TEST_CASE("companion_to_rows rejects overlapping anchors") {
    Graph g = fox_companion();
    g.nodes[1].anchors[0] = {2, 6};  // overlaps "The" [0,3)
    CHECK_THROWS_AS(companion_to_rows(g), Error);
}

TEST_CASE("write_conllu emits the fixed 10-column line") {
    std::vector<TokenRow> rows = {{1, "The", "the", "DET", "DT", {0, 3}}};
    std::ostringstream out;
    write_conllu(rows, out);
    CHECK(out.str() == "1\tThe\tthe\tDET\tDT\t_\t_\t_\t_\tTokenRange=0:3\n\n");
}

TEST_CASE("write_conllu of no rows is an empty sentence block") {
    std::ostringstream out;
    write_conllu({}, out);
    CHECK(out.str() == "\n");
}

TEST_CASE("conllu round-trips the populated fields") {
    Rng rng(51);
    std::vector<Lexeme> lexicon;
    for (const auto& bag :
         {synth_detail::nouns(), synth_detail::verbs(), synth_detail::determiners(), synth_detail::proper_nouns()})
        lexicon.insert(lexicon.end(), bag.begin(), bag.end());
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<TokenRow> rows;
        std::int64_t at = 0;
        int n = 1 + static_cast<int>(rng.below(7));
        for (int i = 0; i < n; ++i) {
            const Lexeme& lex = rng.pick(lexicon);
            std::int64_t len = static_cast<std::int64_t>(utf8_length(lex.form));
            rows.push_back({i + 1, lex.form, lex.lemma, lex.upos, lex.xpos, {at, at + len}});
            at += len + 1;
        }
        std::ostringstream out;
        write_conllu(rows, out, "trial");
        std::istringstream in(out.str());
        auto sentences = read_conllu(in);
        REQUIRE(sentences.size() == 1);
        CHECK(sentences[0].sent_id == "trial");
        CHECK(sentences[0].rows == rows);
    }
}

TEST_CASE("read_conllu splits sentences at blank lines") {
    std::ostringstream out;
    write_conllu({{1, "a", "a", "DET", "DT", {0, 1}}}, out, "s1");
    write_conllu({{1, "b", "b", "NOUN", "NN", {0, 1}}}, out, "s2");
    std::istringstream in(out.str());
    auto sentences = read_conllu(in);
    REQUIRE(sentences.size() == 2);
    CHECK(sentences[0].sent_id == "s1");
    CHECK(sentences[1].sent_id == "s2");
}

TEST_CASE("row anchors never overlap and stay within the input") {
    for (const auto& fw : {"ucca", "ptg", "eds"}) {
        auto corpus = make_corpus(fw, 20, 5150);
        for (const auto& p : corpus) {
            auto rows = companion_to_rows(p.companion);
            auto input_len = static_cast<std::int64_t>(utf8_length(p.companion.input));
            for (std::size_t i = 0; i < rows.size(); ++i) {
                CHECK(rows[i].anchor.from < rows[i].anchor.to);
                CHECK(rows[i].anchor.to <= input_len);
                if (i) CHECK(rows[i - 1].anchor.to <= rows[i].anchor.from);
            }
        }
    }
}
