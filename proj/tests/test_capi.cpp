// SPDX-License-Identifier: Apache-2.0
// Exercises the shared library through the C header only.
#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "convkoop/convkoop.h"

namespace fs = std::filesystem;

namespace {

ck_config* config(std::initializer_list<std::pair<const char*, const char*>> kv) {
    ck_config* c = nullptr;
    EXPECT_EQ(ck_config_new(&c), CK_OK);
    for (const auto& [k, v] : kv) EXPECT_EQ(ck_config_set(c, k, v), CK_OK) << k;
    return c;
}

void collect(const char* path, void* user) { static_cast<std::vector<std::string>*>(user)->push_back(path); }

}  // namespace

TEST(CApi, VersionAndKeys) {
    EXPECT_GT(std::strlen(ck_version()), 0u);
    EXPECT_EQ(ck_config_key_count(), 25u);
    EXPECT_STREQ(ck_config_key(0), "preset");
    EXPECT_EQ(ck_config_key(99), nullptr);
}

TEST(CApi, ConfigErrors) {
    ck_config* c = config({});
    EXPECT_EQ(ck_config_set(c, "nonsense", "1"), CK_ERR_CONFIG);
    EXPECT_NE(std::string(ck_last_error()).find("nonsense"), std::string::npos);
    EXPECT_EQ(ck_config_set(c, "dt", "x"), CK_ERR_CONFIG);
    EXPECT_EQ(ck_config_load(c, "/nonexistent/file.cfg"), CK_ERR_CONFIG);
    EXPECT_EQ(ck_config_set(nullptr, "dt", "1"), CK_ERR_CONTRACT);
    ck_config_free(c);
    ck_config_free(nullptr);
}

TEST(CApi, TrajectoryAndSvdBasis) {
    const size_t n = 3000;
    std::vector<double> x(n);
    for (size_t m = 0; m < n; ++m) x[m] = std::cos(0.01 * m);
    ck_trajectory* tr = nullptr;
    ASSERT_EQ(ck_trajectory_from_array(1, n, 0.01, 0.0, x.data(), &tr), CK_OK);
    EXPECT_EQ(ck_trajectory_length(tr), n);
    EXPECT_EQ(ck_trajectory_channels(tr), 1u);
    EXPECT_DOUBLE_EQ(ck_trajectory_dt(tr), 0.01);

    ck_basis* b = nullptr;
    ASSERT_EQ(ck_basis_svd(tr, 200, 2, &b), CK_OK);
    EXPECT_EQ(ck_basis_rank(b), 2u);
    EXPECT_EQ(ck_basis_window_length(b), 200u);
    double sigma[2];
    ASSERT_EQ(ck_basis_sigma(b, sigma), CK_OK);
    EXPECT_GT(sigma[0], sigma[1]);

    ck_basis* too_many = nullptr;
    EXPECT_EQ(ck_basis_svd(tr, 200, 3, &too_many), CK_ERR_NUMERIC);
    EXPECT_EQ(too_many, nullptr);

    ck_model* m = nullptr;
    ASSERT_EQ(ck_model_havok(b, &m), CK_OK);
    ASSERT_EQ(ck_model_rank(m), 2u);
    double re[2], im[2];
    ASSERT_EQ(ck_model_eigenvalues(m, re, im), CK_OK);
    EXPECT_NEAR(im[0], 1.0, 1e-6);
    EXPECT_NEAR(im[1], -1.0, 1e-6);
    EXPECT_LT(std::abs(re[0]), 1e-6);
    EXPECT_LT(ck_model_discrepancy(m), 1e-4);

    double w0[2] = {1.0, 0.0}, out[2 * 10];
    EXPECT_EQ(ck_model_forecast(m, w0, 10, out), CK_OK);
    EXPECT_EQ(ck_model_forecast(m, w0, 0, out), CK_ERR_CONTRACT);

    ck_model_free(m);
    ck_basis_free(b);
    ck_trajectory_free(tr);
}

TEST(CApi, BadArrays) {
    ck_trajectory* tr = nullptr;
    double bad[3] = {1, NAN, 2};
    EXPECT_EQ(ck_trajectory_from_array(1, 3, 0.1, 0.0, bad, &tr), CK_ERR_NUMERIC);
    double ok[3] = {1, 2, 3};
    EXPECT_EQ(ck_trajectory_from_array(1, 3, -0.1, 0.0, ok, &tr), CK_ERR_CONTRACT);
    EXPECT_EQ(ck_trajectory_from_array(1, 3, 0.1, 0.0, nullptr, &tr), CK_ERR_CONTRACT);
}

TEST(CApi, SimulateAndModelBuild) {
    ck_config* c = config({{"preset", "vdp"}, {"T", "20"}, {"dt", "0.01"}, {"method", "edmd"}, {"dict", "poly6"}, {"rank", "20"}});
    ck_trajectory* sig = nullptr;
    ASSERT_EQ(ck_load_signal(c, &sig), CK_OK);
    EXPECT_EQ(ck_trajectory_channels(sig), 2u);
    EXPECT_EQ(ck_trajectory_length(sig), 2001u);
    ck_model* m = nullptr;
    ASSERT_EQ(ck_model_build(c, sig, &m), CK_OK) << ck_last_error();
    bool lifted = false;
    for (size_t i = 0; i < ck_model_report_size(m); ++i) {
        const char *k, *v;
        ASSERT_EQ(ck_model_report_entry(m, i, &k, &v), CK_OK);
        lifted |= std::string(k) == "lifted_dim" && std::string(v) == "28";
    }
    EXPECT_TRUE(lifted);
    ck_model_free(m);
    ck_trajectory_free(sig);
    ck_config_free(c);
}

TEST(CApi, CommandWritesFiles) {
    const fs::path out = fs::temp_directory_path() / "convkoop_capi_sim";
    fs::remove_all(out);
    ck_config* c = config({{"preset", "lorenz"}, {"T", "1"}, {"out", out.c_str()}});
    std::vector<std::string> files;
    ASSERT_EQ(ck_cmd_simulate(c, collect, &files), CK_OK);
    ASSERT_EQ(files.size(), 1u);
    EXPECT_TRUE(fs::exists(files[0]));
    ck_trajectory* tr = nullptr;
    ASSERT_EQ(ck_trajectory_read_csv(files[0].c_str(), &tr), CK_OK);
    EXPECT_EQ(ck_trajectory_length(tr), 1001u);
    EXPECT_EQ(ck_trajectory_channels(tr), 3u);
    ck_trajectory_free(tr);
    ck_config_free(c);
}

TEST(CApi, CriteriaAndValidateOnly) {
    ASSERT_EQ(ck_criteria_count(), 12u);
    const char *id, *key, *title;
    ASSERT_EQ(ck_criterion_info(2, &id, &key, &title), CK_OK);
    EXPECT_STREQ(key, "theorem3");
    EXPECT_EQ(ck_criterion_info(12, &id, &key, &title), CK_ERR_CONTRACT);

    const fs::path out = fs::temp_directory_path() / "convkoop_capi_val";
    ck_config* c = config({{"only", "theorem1"}, {"out", out.c_str()}});
    ck_report* rep = nullptr;
    ASSERT_EQ(ck_validate(c, &rep), CK_OK) << ck_last_error();
    ASSERT_EQ(ck_report_size(rep), 1u);
    const char *measured, *threshold, *detail;
    int pass = 0;
    double secs = 0;
    ASSERT_EQ(ck_report_row(rep, 0, &id, &key, &pass, &measured, &threshold, &detail, &secs), CK_OK);
    EXPECT_STREQ(key, "theorem1");
    EXPECT_EQ(ck_report_all_pass(rep), pass);
    ck_report_free(rep);

    ASSERT_EQ(ck_config_set(c, "only", "nope"), CK_OK);
    EXPECT_EQ(ck_validate(c, &rep), CK_ERR_CONFIG);
    ck_config_free(c);
}
