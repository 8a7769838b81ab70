#include <doctest.h>

#include <filesystem>
#include <string>

#include "wgsim/constants.hpp"
#include "wgsim/errors.hpp"
#include "wgsim/scenario.hpp"

using namespace wgsim;

namespace {

const char* base_scene = R"(
name: t
particle: n
mirror:
  length_cm: 30
absorber:
  length_m: 0.3
  height_um: 40
beam:
  velocities_m_s: [40, 50]
detector:
  distance_m: 7
  resolution_x_mm: 2
  resolution_t_ms: 1.5
  tof_length_m: 7.3
)";

Scenario one(const std::string& text, std::vector<std::pair<std::string, std::string>> ov = {}) {
    auto all = parse_scenarios(text, "test", ov);
    REQUIRE(all.size() == 1);
    return all.front();
}

// Message of the ValidationError thrown by f, or "" when none is thrown.
template <class F>
std::string failure(F&& f) {
    try {
        f();
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("unit suffixes convert to SI") {
    const auto s = one(base_scene);
    CHECK(s.mirror.length == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(s.absorber.height == doctest::Approx(40e-6).epsilon(1e-15));
    CHECK(s.detector.res_x == doctest::Approx(2e-3).epsilon(1e-15));
    CHECK(s.detector.res_t == doctest::Approx(1.5e-3).epsilon(1e-15));
    CHECK_FALSE(s.mirror.radius.has_value());
    CHECK(s.accel.g == constants::standard_gravity);
    CHECK(s.beam.velocities == std::vector<double>{40, 50});
    CHECK(s.label() == "t");
}

TEST_CASE("validation errors name the field path") {
    CHECK(failure([] { one(std::string(base_scene) + "outputs:\n  patern: true\n"); }).find("outputs.patern") !=
          std::string::npos);
    CHECK(failure([] { one(base_scene, {{"mirror.length_s", "1"}}); }).find("mirror.length_s") != std::string::npos);
    CHECK(failure([] { one(base_scene, {{"mirror.orientation", "sideways"}}); }).find("mirror.orientation") !=
          std::string::npos);
    CHECK(failure([] { one(base_scene, {{"particle", "proton"}}); }).find("particle") != std::string::npos);
    CHECK_FALSE(failure([] { one(base_scene, {{"mirror.wall", "scattering_length"},
                                              {"mirror.wall_length_im_m", "1e-8"}}); })
                    .empty());
    CHECK_FALSE(failure([] { one("particle: n\n"); }).empty());
    CHECK_FALSE(failure([] { one(base_scene, {{"beam.velocities_m_s", "[-1]"}}); }).empty());
    CHECK_THROWS_AS(load_scenarios("/nonexistent/scene.yaml"), IoError);
}

TEST_CASE("overrides replace a quantity given in another unit") {
    const auto s = one(base_scene, {{"mirror.length_m", "0.5"}});
    CHECK(s.mirror.length == 0.5);
    const auto t = one(base_scene, {{"accelerations.extra_g", "1e-3"}});
    CHECK(t.accel.extra == doctest::Approx(1e-3 * constants::standard_gravity).epsilon(1e-15));
    const auto u = one(std::string(base_scene) + "outputs:\n  sensitivity:\n    events: 10\n    field_V_cm: 1.0e4\n");
    CHECK(u.outputs.field == doctest::Approx(1e6).epsilon(1e-15));
    CHECK(u.outputs.sensitivity);
}

TEST_CASE("variants expand and the command line wins over them") {
    const std::string text = std::string(base_scene) +
                             "variants:\n  short:\n    mirror.length_m: 0.1\n    absorber.length_m: 0.05\n  down:\n    mirror.radius_m: 100\n"
                             "    mirror.orientation: down\n";
    const auto all = parse_scenarios(text, "test");
    REQUIRE(all.size() == 2);
    CHECK(all[0].label() == "t-short");
    CHECK(all[0].mirror.length == 0.1);
    CHECK(all[1].mirror.facing_down);
    CHECK(all[1].mirror.radius == 100.0);
    const auto forced = parse_scenarios(text, "test", {{"mirror.length_m", "0.4"}});
    CHECK(forced[0].mirror.length == 0.4);
    CHECK(forced[1].mirror.length == 0.4);
}

TEST_CASE("scene hash is a content digest") {
    const auto a = one(base_scene);
    CHECK(scene_hash(a).size() == 64);
    CHECK(scene_hash(a).find_first_not_of("0123456789abcdef") == std::string::npos);
    // same content written differently
    const auto b = one(R"(
particle: n
name: t
detector: {tof_length_m: 7.30, resolution_t_ms: 1.5, resolution_x_mm: 2.0, distance_m: 7}
beam: {velocities_m_s: [40.0, 5.0e1]}
absorber: {height_um: 40, length_m: 0.3}
mirror: {length_cm: 30.0}
accelerations: {gravity: true}
)");
    CHECK(scene_hash(a) == scene_hash(b));
    CHECK(canonical(a) == canonical(b));
    // one ulp in one field changes it
    const auto c = one(base_scene, {{"detector.distance_m", "7.000000000000001"}});
    CHECK(scene_hash(a) != scene_hash(c));
    CHECK(scene_hash(one(base_scene, {{"seed", "2"}})) != scene_hash(a));
}

TEST_CASE("canonical text prints doubles exactly") {
    // %.17g, so the hash sees every bit
    const auto s = one(base_scene, {{"absorber.height_um", "41.123456789012345"}});
    const auto text = canonical(s);
    const auto pos = text.find("absorber.height=");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(text.substr(pos + 16)) == s.absorber.height);
}

TEST_CASE("shipped scenes parse") {
    int count = 0;
    for (const auto& e : std::filesystem::directory_iterator(WGSIM_SCENE_DIR)) {
        if (e.path().extension() != ".yaml") continue;
        CAPTURE(e.path().string());
        const auto all = load_scenarios(e.path().string());
        CHECK_FALSE(all.empty());
        ++count;
    }
    CHECK(count == 7);
}

TEST_CASE("split_assignment") {
    CHECK(split_assignment("a.b=1=2") == std::pair<std::string, std::string>{"a.b", "1=2"});
    CHECK_THROWS_AS(split_assignment("novalue"), ValidationError);
}
