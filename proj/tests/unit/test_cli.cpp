#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "shortcut/io.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = SHORTCUT_CLI_PATH;
const std::string kSmokeConfig = SHORTCUT_TEST_DATA "/smoke.json";

int run(const std::string& args, const fs::path& stderr_file = "/dev/null") {
    const std::string cmd = "\"" + kCli + "\" " + args + " > /dev/null 2> \"" + stderr_file.string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> tree_contents(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = shortcut::io::read_file(e.path());
    return out;
}

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("shortcut_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

} // namespace

TEST_CASE("pipeline twice gives byte-identical run directories and a complete report") {
    const auto a = fresh_dir("a");
    const auto b = fresh_dir("b");
    REQUIRE(run("pipeline --quiet --config " + kSmokeConfig + " --out " + a.string()) == 0);
    REQUIRE(run("pipeline --quiet --threads 2 --config " + kSmokeConfig + " --out " + b.string()) == 0);
    const auto ta = tree_contents(a);
    CHECK(ta.size() >= 10);
    CHECK(ta == tree_contents(b));

    const auto& report = ta.at("report.txt");
    for (const char* kind : {"LogisticL1", "DecisionTree", "LogitBoost", "Ensemble"}) {
        std::size_t rows = 0;
        std::istringstream in(report);
        for (std::string line; std::getline(in, line);)
            if (line.rfind(kind, 0) == 0 && line.find("+/-") != std::string::npos) ++rows;
        CHECK_MESSAGE(rows == 1, kind);
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("label on an unknown item fails and names the order") {
    const auto dir = fresh_dir("bad");
    REQUIRE(run("generate --quiet --config " + kSmokeConfig + " --out " + dir.string()) == 0);
    std::ofstream(dir / "orders.csv") << "# format=orders version=1\norder_id,dest_x,dest_y,lines\n"
                                      << "BROKEN-7,1,2,\"NO_SUCH_ITEM:1\"\n";
    const auto err = dir / "stderr.txt";
    CHECK(run("label --quiet --config " + kSmokeConfig + " --out " + dir.string(), err) != 0);
    const auto message = shortcut::io::read_file(err);
    CHECK(message.find("BROKEN-7") != std::string::npos);
    CHECK(message.rfind("error: code=", 0) == 0);
    CHECK(std::count(message.begin(), message.end(), '\n') == 1);
    CHECK_FALSE(fs::exists(dir / "labels.csv"));
    fs::remove_all(dir);
}

TEST_CASE("missing inputs and bad flags exit nonzero") {
    const auto dir = fresh_dir("missing");
    CHECK(run("featurize --quiet --out " + dir.string()) != 0);
    CHECK(run("route --quiet --threads 0 --out " + dir.string()) != 0);
    CHECK(run("nonsense") != 0);
    fs::remove_all(dir);
}
