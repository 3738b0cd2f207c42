#include <doctest.h>

#include <set>

#include "travelers/types.hpp"

using namespace travelers;

TEST_CASE("defaults derive f and path budget from n") {
    auto p = SystemParams::with_defaults(200);
    CHECK(p.n == 200);
    CHECK(p.f == 66);
    CHECK(p.paths_per_block == 200);

    auto p2 = SystemParams::with_defaults(100);
    CHECK(p2.f == 33);
}

TEST_CASE("parameter validation rejects inconsistent values") {
    auto p = SystemParams::with_defaults(100);
    p.q = 6;
    p.t = 4;
    p.k = 3;
    CHECK_NOTHROW(p.validate());

    SUBCASE("n zero") {
        p.n = 0;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }
    SUBCASE("threshold above hub size") {
        p.t = 7;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }
    SUBCASE("threshold not a majority") {
        p.t = 3;  // 2t == q leaves Both reachable
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }
    SUBCASE("zero-length path") {
        p.k = 0;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }
    SUBCASE("kappa outside the unit interval") {
        p.kappa = 1.5;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }
    SUBCASE("too many corruptions under the standard assumption") {
        p.f = 34;  // 100 < 3*34 + 1
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
        CHECK_NOTHROW(p.validate(false));  // stress mode admits f = n/3 exactly
    }
}

TEST_CASE("hub classification covers the full (honest, malicious, t) grid") {
    const std::uint32_t q = 9;
    for (std::uint32_t t = 1; t <= q; ++t) {
        for (std::uint32_t h = 0; h <= q; ++h) {
            for (std::uint32_t m = 0; m + h <= q; ++m) {
                const HubType got = classify_hub(h, m, t);
                // Oracle: each side passes alone iff it holds t signatures.
                const bool hp = h >= t, mp = m >= t;
                HubType want = HubType::Impasse;
                if (hp && mp) want = HubType::Both;
                else if (hp) want = HubType::Regular;
                else if (mp) want = HubType::Corrupted;
                CHECK(got == want);
                // Majority thresholds make Both unreachable.
                if (2 * t > q) CHECK(got != HubType::Both);
            }
        }
    }
}

TEST_CASE("hub classification is monotone in each population") {
    const std::uint32_t q = 7, t = 5;
    for (std::uint32_t h = 0; h < q; ++h) {
        for (std::uint32_t m = 0; m + h < q; ++m) {
            const HubType before = classify_hub(h, m, t);
            const HubType more_honest = classify_hub(h + 1, m, t);
            if (before == HubType::Regular) CHECK(more_honest != HubType::Impasse);
            if (before == HubType::Corrupted) {
                const HubType more_mal = classify_hub(h, m + 1, t);
                CHECK((more_mal == HubType::Corrupted || more_mal == HubType::Both));
            }
        }
    }
}

TEST_CASE("locked timestamp is the max approval reading") {
    Certificate cert;
    cert.approvals = {
        {0, 5, {1, 2, 3}},
        {1, 17, {4, 5, 6}},
        {2, 9, {7, 8, 9}},
    };
    CHECK(locked_timestamp(cert) == 17);
    CHECK(locked_timestamp(cert, 3) == 17);
}

TEST_CASE("incomplete certificates are rejected") {
    Certificate cert;
    CHECK_THROWS_AS(locked_timestamp(cert), IncompleteCertificateError);

    cert.approvals = {{0, 5, {1}}, {2, 9, {2}}};  // hub 1 missing
    CHECK_THROWS_AS(locked_timestamp(cert), IncompleteCertificateError);

    cert.approvals = {{0, 5, {1}}, {1, 9, {2}}};
    CHECK_THROWS_AS(locked_timestamp(cert, 3), IncompleteCertificateError);
    CHECK(locked_timestamp(cert, 2) == 9);
}

TEST_CASE("transaction ids are content-determined") {
    auto a = make_transaction(7, 42, 256, 1000);
    auto b = make_transaction(7, 42, 256, 2000);  // same content, later submit
    auto c = make_transaction(7, 43, 256, 1000);
    CHECK(a.id == b.id);
    CHECK(a.id != c.id);
    CHECK(a.submit_time == 1000);
    CHECK(b.submit_time == 2000);
    CHECK_THROWS_AS(make_transaction(7, 42, 0, 0), std::invalid_argument);

    // No accidental collisions across a small client/sequence grid.
    std::set<std::string> seen;
    for (std::uint32_t cl = 0; cl < 8; ++cl)
        for (std::uint64_t s = 0; s < 8; ++s)
            seen.insert(to_hex(make_transaction(cl, s, 64, 0).id));
    CHECK(seen.size() == 64);
}

TEST_CASE("hex rendering") {
    Digest d{};
    d[0] = 0xab;
    d[31] = 0x01;
    auto hex = to_hex(d);
    CHECK(hex.size() == 64);
    CHECK(hex.substr(0, 2) == "ab");
    CHECK(hex.substr(62, 2) == "01");
}

TEST_CASE("label names") {
    CHECK(std::string(to_string(TimestampKind::True)) == "true");
    CHECK(std::string(to_string(TimestampKind::Arbitrary)) == "arbitrary");
    CHECK(std::string(to_string(HubType::Impasse)) == "impasse");
}
