#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "support/generators.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "lasagne_cli_tests";

int run(const std::string& args) {
    const std::string cmd = std::string("\"") + LASAGNE_CLI_PATH + "\" " + args + " >> " +
                            (kWork / "run.log").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Workspace {
    Workspace() {
        fs::remove_all(kWork);
        fs::create_directories(kWork);

        std::ofstream edges(kWork / "g.edges");
        const auto g = testgraphs::two_cliques(6);
        for (lasagne::NodeId u = 0; u < g.num_nodes(); ++u)
            for (lasagne::NodeId v : g.neighbors(u))
                if (u < v) edges << "n" << u << " n" << v << "\n";

        std::ofstream labels(kWork / "g.labels");
        for (int u = 0; u < 12; ++u) labels << "n" << u << " " << (u < 6 ? "left" : "right") << "\n";
    }
};

std::string common_embed_flags() {
    return "--dim 16 --delta 1e-2 --walk-len 10 --walks-per-node 2 --window 3 --seed 4";
}

} // namespace

TEST_CASE("cli pipeline") {
    static Workspace ws; // build inputs once, cases below run in order

    const std::string edges = (kWork / "g.edges").string();

    SUBCASE("usage and data errors map to distinct exit codes") {
        CHECK(run("--help") == 0);
        CHECK(run("") == 1);                    // missing subcommand
        CHECK(run("embed --nope") == 1);        // unknown flag
        CHECK(run("embed --edges " + edges) == 1); // missing required --out

        CHECK(run("embed --edges /no/such/file.edges --out " + (kWork / "x.emb").string()) == 2);

        std::ofstream bad(kWork / "bad.edges");
        bad << "only_one_token\n";
        bad.close();
        CHECK(run("embed --edges " + (kWork / "bad.edges").string() + " --out " +
                  (kWork / "x.emb").string()) == 2);
    }

    SUBCASE("embed writes embeddings plus a manifest") {
        const auto out = (kWork / "emb.txt").string();
        REQUIRE(run("embed --edges " + edges + " " + common_embed_flags() + " --out " + out) == 0);

        std::ifstream emb(out);
        int n = 0, d = 0;
        REQUIRE(static_cast<bool>(emb >> n >> d));
        CHECK(n == 12);
        CHECK(d == 16);
        std::string label;
        double first_component = 0;
        REQUIRE(static_cast<bool>(emb >> label >> first_component));
        CHECK(label.rfind("n", 0) == 0);

        const auto manifest = slurp(kWork / "emb.txt.manifest.json");
        CHECK(manifest.find("\"subcommand\": \"embed\"") != std::string::npos);
        CHECK(manifest.find("fnv1a64") != std::string::npos);
        CHECK(manifest.find("\"rng_seed\": 4") != std::string::npos);
    }

    SUBCASE("split appr+train reproduces the fused embed output byte for byte") {
        const auto fused = (kWork / "emb.txt").string();
        REQUIRE(run("embed --edges " + edges + " " + common_embed_flags() + " --out " + fused) == 0);

        const auto sidecar = (kWork / "g.appr").string();
        const auto split = (kWork / "emb_split.txt").string();
        REQUIRE(run("appr --edges " + edges + " --delta 1e-2 --out " + sidecar) == 0);
        REQUIRE(run("train --edges " + edges + " --appr " + sidecar +
                    " --dim 16 --walk-len 10 --walks-per-node 2 --window 3 --seed 4 --out " +
                    split) == 0);

        const auto a = slurp(fused), b = slurp(split);
        REQUIRE_FALSE(a.empty());
        CHECK(a == b);
    }

    SUBCASE("alpha sweep fans out suffixed artifacts") {
        const auto out = (kWork / "sweep.txt").string();
        REQUIRE(run("embed --edges " + edges + " --alpha 0.2,0.3 " + common_embed_flags() +
                    " --out " + out) == 0);
        CHECK(fs::exists(kWork / "sweep.alpha0.2.txt"));
        CHECK(fs::exists(kWork / "sweep.alpha0.3.txt"));
        CHECK_FALSE(fs::exists(kWork / "sweep.txt"));
        CHECK(slurp(kWork / "sweep.alpha0.2.txt") != slurp(kWork / "sweep.alpha0.3.txt"));
    }

    SUBCASE("multilabel evaluation reads embeddings back") {
        const auto emb = (kWork / "emb_eval.txt").string();
        REQUIRE(run("embed --edges " + edges + " " + common_embed_flags() + " --out " + emb) == 0);

        const auto report = (kWork / "report.txt").string();
        REQUIRE(run("eval-multilabel --edges " + edges + " --labels " +
                    (kWork / "g.labels").string() + " --emb " + emb +
                    " --protocol former --train-frac 0.75 --reps 2 --out " + report) == 0);
        const auto content = slurp(report);
        CHECK(content.find("protocol former") != std::string::npos);
        CHECK(content.find("macro_f1") != std::string::npos);
        CHECK(content.find("train_fraction") != std::string::npos);
    }

    SUBCASE("diagnostics subcommand writes a csv") {
        const auto csv = (kWork / "hop.csv").string();
        REQUIRE(run("diag --edges " + edges +
                    " --op hop-profile --source appr --delta 1e-2 --samples-per-bucket 3"
                    " --contexts-per-seed 50 --out " + csv) == 0);
        const auto content = slurp(csv);
        CHECK(content.rfind("# ", 0) == 0);
        CHECK(content.find("bucket_lo") != std::string::npos);
    }
}
