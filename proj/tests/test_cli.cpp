#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fuzzyseg/imageio.hpp"
#include "fuzzyseg/metrics.hpp"

using namespace fuzzyseg;
namespace fs = std::filesystem;

namespace {

std::string cli_binary() {
    const char* bin = std::getenv("FUZZYSEG_BIN");
    REQUIRE_MESSAGE(bin != nullptr,
                    "FUZZYSEG_BIN must point at the fuzzyseg binary (ctest sets it)");
    return bin;
}

struct RunResult {
    int exit_code = -1;
    std::string stdout_text;
};

RunResult run_cli(const std::string& args, const fs::path& tmp,
                  const std::string& env_prefix = "") {
    const fs::path out = tmp / "stdout.txt";
    const std::string cmd =
        env_prefix + " " + cli_binary() + " " + args + " > " + out.string() + " 2> " +
        (tmp / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    result.stdout_text = buffer.str();
    return result;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("fuzzyseg_cli_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int value = 0;
        return value;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void make_phantom(const TempDir& tmp) {
    const RunResult r = run_cli(
        "phantom --width 48 --height 48 --disk 16,24,9 --disk 35,24,6 "
        "--out-image " + tmp.file("p.pgm") + " --out-mask " + tmp.file("m.pgm"),
        tmp.path);
    REQUIRE(r.exit_code == 0);
}

}  // namespace

TEST_CASE("segment on a noiseless phantom matches the mask up to cluster naming") {
    TempDir tmp;
    make_phantom(tmp);
    const RunResult r = run_cli("segment --algo fcm --clusters 2 --input " +
                                    tmp.file("p.pgm") + " --output " +
                                    tmp.file("l.pgm"),
                                tmp.path);
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("algorithm=fcm") != std::string::npos);
    CHECK(r.stdout_text.find("converged=true") != std::string::npos);
    CHECK(r.stdout_text.find("iterations=") != std::string::npos);
    CHECK(r.stdout_text.find("objective=") != std::string::npos);

    // relabel-agnostic comparison against the ground truth
    const GrayImage labels = read_gray(tmp.file("l.pgm"));
    const BinaryMask gt = read_mask(tmp.file("m.pgm"));
    std::vector<std::size_t> hard(labels.pixel_count());
    for (std::size_t k = 0; k < hard.size(); ++k) {
        hard[k] = labels.intensities[k] > 0.5 ? 1 : 0;
    }
    const auto object_clusters = match_clusters(hard, gt, 2);
    const BinaryMask seg = labels_to_mask(hard, 48, 48, object_clusters);
    CHECK(evaluate(seg, gt).similarity == 100.0);
}

TEST_CASE("segment validates its arguments") {
    TempDir tmp;
    make_phantom(tmp);
    CHECK(run_cli("segment --algo fcm --clusters 1 --input " + tmp.file("p.pgm") +
                      " --output " + tmp.file("l.pgm"),
                  tmp.path)
              .exit_code == 2);
    CHECK(run_cli("segment --algo nope --input " + tmp.file("p.pgm") +
                      " --output " + tmp.file("l.pgm"),
                  tmp.path)
              .exit_code == 2);
    CHECK(run_cli("segment --algo fcm --input " + tmp.file("absent.pgm") +
                      " --output " + tmp.file("l.pgm"),
                  tmp.path)
              .exit_code == 4);
}

TEST_CASE("segment is byte-deterministic for a fixed seed") {
    TempDir tmp;
    make_phantom(tmp);
    for (const std::string algo : {"fcm", "mfcm", "pcm", "fpcm"}) {
        CAPTURE(algo);
        const std::string first = tmp.file(algo + "_1.pgm");
        const std::string second = tmp.file(algo + "_2.pgm");
        const RunResult a = run_cli("segment --algo " + algo + " --seed 3 --input " +
                                        tmp.file("p.pgm") + " --output " + first +
                                        " --membership " + tmp.file(algo + "_1.csv"),
                                    tmp.path);
        const RunResult b = run_cli("segment --algo " + algo + " --seed 3 --input " +
                                        tmp.file("p.pgm") + " --output " + second +
                                        " --membership " + tmp.file(algo + "_2.csv"),
                                    tmp.path);
        REQUIRE(a.exit_code == 0);
        REQUIRE(b.exit_code == 0);
        CHECK(slurp(first) == slurp(second));
        CHECK(slurp(tmp.file(algo + "_1.csv")) == slurp(tmp.file(algo + "_2.csv")));
        CHECK(a.stdout_text == b.stdout_text);
    }
}

TEST_CASE("evaluate prints the report block and appends CSV") {
    TempDir tmp;
    make_phantom(tmp);
    const RunResult r = run_cli("evaluate --seg " + tmp.file("m.pgm") + " --gt " +
                                    tmp.file("m.pgm") + " --csv " + tmp.file("e.csv") +
                                    " --algo perfect",
                                tmp.path);
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("similarity=100") != std::string::npos);
    CHECK(r.stdout_text.find("false_positive_ratio=0") != std::string::npos);
    const std::string csv = slurp(tmp.file("e.csv"));
    CHECK(csv.find("algo,similarity,fpr,fnr,tp,fp,fn,tn") == 0);
    CHECK(csv.find("perfect,100,0,0,") != std::string::npos);

    // jaccard option is accepted
    const RunResult j = run_cli("evaluate --index jaccard --seg " + tmp.file("m.pgm") +
                                    " --gt " + tmp.file("m.pgm"),
                                tmp.path);
    CHECK(j.exit_code == 0);
    CHECK(j.stdout_text.find("similarity=100") != std::string::npos);
}

TEST_CASE("phantom spec file and inline flags agree") {
    TempDir tmp;
    {
        std::ofstream spec(tmp.file("spec.txt"));
        spec << "width=48\nheight=48\n"
             << "background_intensity=0.25\nobject_intensity=0.75\n"
             << "disk=16,24,9\ndisk=35,24,6\nnoise=none\n";
    }
    const RunResult a = run_cli("phantom --spec " + tmp.file("spec.txt") +
                                    " --out-image " + tmp.file("a.pgm") +
                                    " --out-mask " + tmp.file("am.pgm"),
                                tmp.path);
    REQUIRE(a.exit_code == 0);
    make_phantom(tmp);
    CHECK(slurp(tmp.file("a.pgm")) == slurp(tmp.file("p.pgm")));
    CHECK(slurp(tmp.file("am.pgm")) == slurp(tmp.file("m.pgm")));
    CHECK(a.stdout_text.find("object_pixels=") != std::string::npos);

    // inline override of a file value
    const RunResult b = run_cli("phantom --spec " + tmp.file("spec.txt") +
                                    " --object-intensity 0.9 --out-image " +
                                    tmp.file("b.pgm") + " --out-mask " +
                                    tmp.file("bm.pgm"),
                                tmp.path);
    REQUIRE(b.exit_code == 0);
    CHECK(slurp(tmp.file("b.pgm")) != slurp(tmp.file("a.pgm")));
    CHECK(slurp(tmp.file("bm.pgm")) == slurp(tmp.file("am.pgm")));

    // invalid phantom geometry is a usage error
    CHECK(run_cli("phantom --width 20 --height 20 --disk 5,5,12 --out-image " +
                      tmp.file("x.pgm") + " --out-mask " + tmp.file("xm.pgm"),
                  tmp.path)
              .exit_code == 2);
    // unreadable spec file is an I/O error
    CHECK(run_cli("phantom --spec " + tmp.file("nope.txt") + " --out-image " +
                      tmp.file("x.pgm") + " --out-mask " + tmp.file("xm.pgm"),
                  tmp.path)
              .exit_code == 4);
}

TEST_CASE("benchmark emits per-cell rows plus one mean row per algorithm") {
    TempDir tmp;
    {
        // straight-edged region: every algorithm lands at (or within 0.5 of) 100
        std::ofstream spec(tmp.file("spec.txt"));
        spec << "width=48\nheight=48\n"
             << "background_intensity=0.25\nobject_intensity=0.75\n"
             << "rect=18,0,12,48\nnoise=none\n";
    }
    const RunResult r = run_cli("benchmark --spec " + tmp.file("spec.txt") +
                                    " --algos fcm,mfcm,fpcm --seeds 1,2 --csv " +
                                    tmp.file("b.csv"),
                                tmp.path);
    REQUIRE(r.exit_code == 0);
    CHECK(r.stdout_text.find("mean_similarity_fcm=") != std::string::npos);

    std::ifstream csv(tmp.file("b.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "algo,similarity,fpr,fnr,tp,fp,fn,tn");
    std::size_t rows = 0, mean_rows = 0;
    double worst_mean_similarity = 100.0;
    while (std::getline(csv, line)) {
        ++rows;
        if (line.find("-mean,") != std::string::npos) {
            ++mean_rows;
            const auto comma = line.find(',');
            const double sim = std::stod(line.substr(comma + 1));
            worst_mean_similarity = std::min(worst_mean_similarity, sim);
        }
    }
    CHECK(rows == 3 * 2 + 3);  // |algos| * |seeds| + |algos|
    CHECK(mean_rows == 3);
    // noiseless phantom: every algorithm should sit at (or within 0.5 of) 100
    CHECK(worst_mean_similarity >= 99.5);
}

TEST_CASE("benchmark output is identical across FUZZYSEG_THREADS settings") {
    TempDir tmp;
    {
        std::ofstream spec(tmp.file("spec.txt"));
        spec << "width=40\nheight=40\n"
             << "background_intensity=0.25\nobject_intensity=0.75\n"
             << "disk=14,20,8\ndisk=30,20,5\nnoise=gaussian\nsigma=0.1\n";
    }
    const RunResult seq = run_cli("benchmark --spec " + tmp.file("spec.txt") +
                                      " --algos fcm,fpcm --seeds 1,2,3 --csv " +
                                      tmp.file("seq.csv"),
                                  tmp.path, "FUZZYSEG_THREADS=0");
    const RunResult par = run_cli("benchmark --spec " + tmp.file("spec.txt") +
                                      " --algos fcm,fpcm --seeds 1,2,3 --csv " +
                                      tmp.file("par.csv"),
                                  tmp.path, "FUZZYSEG_THREADS=4");
    REQUIRE(seq.exit_code == 0);
    REQUIRE(par.exit_code == 0);
    CHECK(slurp(tmp.file("seq.csv")) == slurp(tmp.file("par.csv")));
    CHECK(seq.stdout_text == par.stdout_text);
}

TEST_CASE("missing subcommand or bad flags exit with code 2") {
    TempDir tmp;
    CHECK(run_cli("", tmp.path).exit_code == 2);
    CHECK(run_cli("segment --input a --output b --bogus-flag 3", tmp.path).exit_code == 2);
}

TEST_CASE("verbose segment logs one line per iteration") {
    TempDir tmp;
    make_phantom(tmp);
    const RunResult r = run_cli("segment --algo fcm --verbose --input " +
                                    tmp.file("p.pgm") + " --output " +
                                    tmp.file("l.pgm"),
                                tmp.path);
    REQUIRE(r.exit_code == 0);
    CHECK(r.stdout_text.find("iter=1 delta=") != std::string::npos);
    // iterations reported at the end match the number of logged lines
    std::size_t lines = 0;
    for (std::size_t pos = r.stdout_text.find("iter=");
         pos != std::string::npos; pos = r.stdout_text.find("iter=", pos + 1)) {
        if (r.stdout_text.compare(pos, 5, "iter=") == 0 &&
            (pos == 0 || r.stdout_text[pos - 1] == '\n')) {
            ++lines;
        }
    }
    const auto it = r.stdout_text.find("iterations=");
    REQUIRE(it != std::string::npos);
    const std::size_t reported = std::stoul(r.stdout_text.substr(it + 11));
    CHECK(lines == reported);
}
