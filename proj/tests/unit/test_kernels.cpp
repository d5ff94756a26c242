#include <cstring>
#include <random>
#include <vector>

#include <omp.h>

#include "doctest.h"
#include "generators.hpp"
#include "kmissing/kernels.hpp"

using namespace kmissing;
namespace ks = kmissing::kernels::serial;
namespace ko = kmissing::kernels::omp;

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// Large enough to cross the parallel-work threshold.
struct Instance {
    DataMatrix x;
    MaskMatrix r;
    CenterMatrix m;
    std::vector<int> labels;
};

Instance make_instance(std::size_t n, std::size_t p, std::size_t k, std::mt19937_64& rng) {
    Instance in{testing::random_data(n, p, rng), testing::random_mask(n, p, rng), testing::random_centers(k, p, rng),
                std::vector<int>(n)};
    std::uniform_int_distribution<int> lab(0, static_cast<int>(k) - 1);
    for (auto& l : in.labels) l = lab(rng);
    return in;
}

}  // namespace

TEST_CASE("serial and OpenMP kernels are bit-identical") {
    std::mt19937_64 rng(3);
    const int max_threads = omp_get_max_threads();
    for (const int threads : {1, 2, 3, 8}) {
        omp_set_num_threads(threads);
        for (const std::size_t n : {17UL, 5000UL, 40000UL}) {
            const std::size_t p = 3, k = 4;
            const auto in = make_instance(n, p, k, rng);

            std::vector<int> ls(n), lo(n);
            std::vector<double> ds(n), d_o(n);
            ks::assign(in.x.view(), in.m.view(), ls, ds);
            ko::assign(in.x.view(), in.m.view(), lo, d_o);
            CHECK(ls == lo);
            CHECK(same_bits(ds, d_o));

            ks::assign_masked(in.x.view(), in.r.view(), in.m.view(), ls, ds);
            ko::assign_masked(in.x.view(), in.r.view(), in.m.view(), lo, d_o);
            CHECK(ls == lo);
            CHECK(same_bits(ds, d_o));

            std::vector<double> cs = in.m.values(), co = in.m.values();
            std::vector<std::size_t> ns(k), no(k);
            ks::update(in.x.view(), in.labels, cs, k, ns);
            ko::update(in.x.view(), in.labels, co, k, no);
            CHECK(ns == no);
            CHECK(same_bits(cs, co));

            cs = in.m.values();
            co = in.m.values();
            std::vector<std::size_t> cells_s(k * p), cells_o(k * p);
            ks::update_masked(in.x.view(), in.r.view(), in.labels, cs, k, cells_s);
            ko::update_masked(in.x.view(), in.r.view(), in.labels, co, k, cells_o);
            CHECK(cells_s == cells_o);
            CHECK(same_bits(cs, co));
        }
    }
    omp_set_num_threads(max_threads);
}

TEST_CASE("masked kernels with a full mask reproduce the plain kernels bit for bit") {
    std::mt19937_64 rng(4);
    const std::size_t n = 3000, p = 4, k = 3;
    auto in = make_instance(n, p, k, rng);
    const auto ones = MaskMatrix::ones(n, p);

    std::vector<int> la(n), lb(n);
    std::vector<double> da(n), db(n);
    ko::assign(in.x.view(), in.m.view(), la, da);
    ko::assign_masked(in.x.view(), ones.view(), in.m.view(), lb, db);
    CHECK(la == lb);
    CHECK(same_bits(da, db));

    std::vector<double> ca = in.m.values(), cb = in.m.values();
    std::vector<std::size_t> na(k), nb(k * p);
    ko::update(in.x.view(), in.labels, ca, k, na);
    ko::update_masked(in.x.view(), ones.view(), in.labels, cb, k, nb);
    CHECK(same_bits(ca, cb));
}

TEST_CASE("update keeps previous rows and cells without data") {
    const DataMatrix x(2, 2, {1, 2, 3, 4});
    std::vector<int> labels{0, 0};
    std::vector<double> centers{0, 0, 7, 7};
    std::vector<std::size_t> counts(2);
    ks::update(x.view(), labels, centers, 2, counts);
    CHECK(centers == std::vector<double>{2, 3, 7, 7});
    CHECK(counts == std::vector<std::size_t>{2, 0});

    const MaskMatrix r(2, 2, {1, 0, 1, 0});
    centers = {0, 5, 7, 7};
    std::vector<std::size_t> cells(4);
    ks::update_masked(x.view(), r.view(), labels, centers, 2, cells);
    CHECK(centers == std::vector<double>{2, 5, 7, 7});
    CHECK(cells == std::vector<std::size_t>{2, 0, 0, 0});
}

TEST_CASE("assign breaks ties toward the lowest index") {
    const DataMatrix x(1, 1, {1.0});
    const CenterMatrix m(3, 1, {2.0, 0.0, 2.0});
    std::vector<int> labels(1);
    std::vector<double> loss(1);
    ks::assign(x.view(), m.view(), labels, loss);
    CHECK(labels[0] == 0);
    CHECK(loss[0] == 1.0);
}
