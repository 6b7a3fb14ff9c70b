#include "kvwb/builtins.hpp"
#include "kvwb/io.hpp"
#include "kvwb/pipeline.hpp"

#include <catch_amalgamated.hpp>

using namespace kvwb;

namespace {

bool all_agree(const std::vector<RecheckItem>& items) {
    for (const auto& item : items)
        if (!item.agrees) return false;
    return !items.empty();
}

}  // namespace

TEST_CASE("rationals and matrices survive a JSON round trip", "[io]") {
    const Rational q(-7, 12);
    CHECK(to_json(q) == "-7/12");
    CHECK(rational_from_json(to_json(q)) == q);
    CHECK(rational_from_json(Json(0.25)) == Rational(1, 4));
    CHECK(rational_from_json(Json("0.125")) == Rational(1, 8));

    QMatrix m(2, 3);
    m << Rational(1, 2), Rational(0), Rational(-3), Rational(5, 7), Rational(1), Rational(2, 9);
    CHECK(qmatrix_from_json(to_json(m)) == m);
    CHECK_THROWS_AS(rational_from_json(Json("one half")), ParseError);
}

TEST_CASE("polytope models survive a JSON round trip", "[io]") {
    for (const std::string name : {"classical:3", "squit", "bitsum"}) {
        const Model m = builtin_model(name);
        const Json j = model_to_json(m);
        const Model back = model_from_json(j);
        CHECK(model_to_json(back) == j);
        CHECK(validate_model(back).ok());
    }
}

TEST_CASE("quantum models reload from their JSON description", "[io]") {
    const Model m = builtin_model("qubit:complex");
    const Json j = model_to_json(m);
    CHECK(model_to_json(model_from_json(j)) == j);
}

TEST_CASE("malformed model JSON is rejected", "[io]") {
    Json j = model_to_json(builtin_model("classical:2"));
    Json dangling = j;
    dangling["tests"][0].push_back("nowhere");
    CHECK_THROWS_AS(model_from_json(dangling), ParseError);
    // A state that sums to 2 on a test parses but fails validation.
    Json heavy = j;
    heavy["states"]["extreme"][0][heavy["outcomes"][0].get<std::string>()] = "2";
    CHECK_FALSE(validate_model(model_from_json(heavy)).ok());
    CHECK_THROWS_AS(model_from_json(Json::parse(R"({"outcomes": 3})")), ParseError);
}

TEST_CASE("trit pipeline passes every stage", "[pipeline]") {
    const PipelineReport r = run_pipeline(builtin_model("classical:3"), {});
    for (const auto& s : r.stages) CHECK(s.status == StageStatus::Pass);
    CHECK(r.exit_code() == 0);
    const Json form = r.stage("spin_form").detail["form"]["matrix"];
    CHECK(form[0][0] == "1/3");
    CHECK(form[0][1] == "0");
    CHECK(r.stage("identification").detail["candidates"].dump().find("R + R + R") != std::string::npos);
}

TEST_CASE("squit failures match expectations", "[pipeline]") {
    const Model squit = builtin_model("squit");
    const PipelineReport plain = run_pipeline(squit, {});
    CHECK(plain.stage("self_duality").status == StageStatus::Fail);
    CHECK(plain.stage("sharpness").status == StageStatus::Fail);
    CHECK(plain.stage("jordan_recovery").status == StageStatus::NotApplicable);
    CHECK(plain.exit_code() != 0);

    PipelineOptions expecting;
    expecting.expectations = {"not-self-dual", "not-sharp"};
    CHECK(run_pipeline(squit, expecting).exit_code() == 0);

    PipelineOptions wrong;
    wrong.expectations = {"not-self-dual", "not-sharp", "reducible"};
    const PipelineReport unmet = run_pipeline(squit, wrong);
    CHECK(unmet.exit_code() != 0);
    CHECK(unmet.unmet_expectations == std::vector<std::string>{"reducible"});

    PipelineOptions unknown;
    unknown.expectations = {"not-round"};
    CHECK_THROWS_AS(run_pipeline(squit, unknown), ParseError);
}

TEST_CASE("pipeline JSON is reproducible for a fixed seed", "[pipeline]") {
    const Model m = builtin_model("qubit:real");
    CHECK(to_json(run_pipeline(m, {})).dump() == to_json(run_pipeline(m, {})).dump());
}

TEST_CASE("recheck agrees on saved reports and catches tampering", "[pipeline]") {
    for (const std::string name : {"classical:3", "squit", "qubit:complex"}) {
        const Json saved = Json::parse(to_json(run_pipeline(builtin_model(name), {})).dump());
        INFO(name);
        CHECK(all_agree(recheck_report(saved)));
    }

    Json tampered = to_json(run_pipeline(builtin_model("classical:3"), {}));
    for (auto& s : tampered["stages"])
        if (s["name"] == "spin_form") s["detail"]["form"]["matrix"][0][0] = "1/2";
    CHECK_FALSE(all_agree(recheck_report(tampered)));
}

TEST_CASE("markdown mirrors the JSON report", "[pipeline]") {
    const Json report = to_json(run_pipeline(builtin_model("squit"), {}));
    const std::string md = json_to_markdown(report);
    for (const auto& s : report["stages"]) {
        CHECK(md.find(s["name"].get<std::string>()) != std::string::npos);
        CHECK(md.find(s["status"].get<std::string>()) != std::string::npos);
    }
    for (const auto& [key, value] : report.items())
        if (key != "stages") CHECK(md.find("- " + key) != std::string::npos);
}
