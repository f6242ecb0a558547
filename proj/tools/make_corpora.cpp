// Regenerates the bundled synthetic corpora under data/. Run from the
// repository root; outputs are committed so tests never depend on running
// this tool.

#include <fstream>
#include <iostream>

#include "mrparse/graph_io.hpp"
#include "mrparse/synthetic.hpp"

using namespace mrparse;

namespace {

void write_corpus(const std::string& framework, std::size_t count, std::uint64_t seed,
                  const std::string& stem) {
    std::ofstream gold(stem + ".mrp");
    std::ofstream companion(stem + "_companion.mrp");
    for (std::size_t i = 0; i < count; ++i) {
        SyntheticPair p = make_synthetic(framework, seed, i);
        write_mrp({p.gold}, gold);
        write_mrp({p.companion}, companion);
    }
    std::cout << stem << ".mrp: " << count << " " << framework << " graph(s)\n";
}

}  // namespace

int main() {
    // training corpus for the end-to-end learnability check
    write_corpus("ucca", 50, 2020, "data/synthetic/ucca_train");
    // smaller corpora covering the other framework profiles
    write_corpus("ptg", 30, 2021, "data/synthetic/ptg_train");
    write_corpus("eds", 30, 2022, "data/synthetic/eds_train");
    write_corpus("amr", 30, 2023, "data/synthetic/amr_train");
    write_corpus("drg", 30, 2024, "data/synthetic/drg_train");
    // pre-train / fine-tune pair: a second, smaller drg corpus with fresh text
    write_corpus("drg", 15, 3030, "data/synthetic/drg_small");
    return 0;
}
