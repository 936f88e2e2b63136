#include "equivfuse/hir/check.h"
#include "equivfuse/hir/parser.h"
#include "equivfuse/support/error.h"

#include "fixtures.h"
#include "progen.h"

#include <gtest/gtest.h>

using namespace equivfuse;
using namespace equivfuse::hir;

namespace {

ValidatedFunction checkSource(const std::string &src, const std::vector<PortDirective> &dirs = {}) {
  HirProgram p = parseMiniC(src);
  applyDirectives(p.functions.at(0), dirs);
  return checkFunction(p.functions.at(0));
}

ErrorKind checkError(const std::string &src) {
  try {
    checkSource(src);
  } catch (const Error &e) {
    return e.kind();
  }
  ADD_FAILURE() << "accepted: " << src;
  return ErrorKind::Io;
}

const Variable &var(const ValidatedFunction &f, const std::string &name) {
  return f.fn().vars.at(*f.fn().findVar(name));
}

} // namespace

TEST(HirCheck, SortListingIsAccepted) {
  ValidatedFunction f = checkSource(testkit::readFixture("c/Sort.cpp"));
  EXPECT_EQ(var(f, "input").dir, ParamDir::In);
  EXPECT_EQ(var(f, "output").dir, ParamDir::Out);
  EXPECT_FALSE(var(f, "temp").isParam);
  EXPECT_TRUE(f.warnings().empty());
}

TEST(HirCheck, AllCFixturesCheck) {
  for (const char *file : {"c/sort_bubble4.cpp", "c/sort_desc4.cpp", "c/sort_network4.cpp", "c/Dot64.cpp",
                           "c/Dot64_truncation.cpp", "c/dot4.cpp", "c/dot4_truncation.cpp", "c/dot2.cpp"}) {
    SCOPED_TRACE(file);
    EXPECT_NO_THROW(checkSource(testkit::readFixture(file)));
  }
}

TEST(HirCheck, ParameterBoundIsNonConstant) {
  EXPECT_EQ(checkError("void f(int n, int &x){ for (int i = 0; i < n; i++) x = x + 1; }"),
            ErrorKind::NonConstantBound);
}

TEST(HirCheck, ConstantIndexPastEnd) {
  EXPECT_EQ(checkError("void f(unsigned char a[8], unsigned char &x){ x = a[8]; }"),
            ErrorKind::StaticOutOfBounds);
  EXPECT_EQ(checkError("void f(unsigned char a[8], unsigned char &x){ x = a[-1]; }"),
            ErrorKind::StaticOutOfBounds);
}

TEST(HirCheck, LoopDrivenIndexPastEnd) {
  EXPECT_EQ(checkError("void f(unsigned char a[8], unsigned char &x){ for (int i = 0; i <= 8; i++) x = a[i]; }"),
            ErrorKind::StaticOutOfBounds);
  EXPECT_EQ(checkError("void f(unsigned char a[8], unsigned char &x){ for (int i = 0; i < 8; i++) x = a[i + 1]; }"),
            ErrorKind::StaticOutOfBounds);
  EXPECT_NO_THROW(checkSource("void f(unsigned char a[8], unsigned char &x){ for (int i = 1; i < 8; i++) x = a[i - 1]; }"));
}

TEST(HirCheck, MixedWidthsNeedCasts) {
  EXPECT_EQ(checkError("void f(unsigned char a, unsigned short b, unsigned short &x){ x = a + b; }"),
            ErrorKind::TypeMismatch);
  EXPECT_EQ(checkError("void f(int a, unsigned char &x){ x = a; }"), ErrorKind::TypeMismatch);
  EXPECT_EQ(checkError("void f(int a, unsigned &x){ x = a; }"), ErrorKind::TypeMismatch);
  EXPECT_EQ(checkError("void f(unsigned char &x){ x = 300; }"), ErrorKind::TypeMismatch);
  EXPECT_NO_THROW(checkSource("void f(unsigned char a, unsigned short b, unsigned short &x){ x = (unsigned short)a + b; }"));
}

TEST(HirCheck, ComparisonsAreOneBitUnsigned) {
  ValidatedFunction f = checkSource("void f(int a, int b, bool &x){ x = a < b; }");
  const Expr &rhs = f.fn().body.at(0).rhs;
  EXPECT_EQ(rhs.type, HirType::scalar(Signedness::Unsigned, 1));
  EXPECT_EQ(checkError("void f(int a, int b, int &x){ x = a < b; }"), ErrorKind::TypeMismatch);
}

TEST(HirCheck, ShiftRightFollowsSign) {
  ValidatedFunction f = checkSource("void f(int a, unsigned b, int &x, unsigned &y){ x = a >> 2; y = b >> 2; }");
  EXPECT_EQ(f.fn().body[0].rhs.binop, BinOp::Ashr);
  EXPECT_EQ(f.fn().body[1].rhs.binop, BinOp::Lshr);
}

TEST(HirCheck, CastKindsFromWidths) {
  ValidatedFunction f = checkSource(
      "void f(signed char a, unsigned char b, int &x, unsigned &y, unsigned char &z){"
      " x = (int)a; y = (unsigned)b; z = (unsigned char)x; }");
  EXPECT_EQ(f.fn().body[0].rhs.cast, CastKind::Sext);
  EXPECT_EQ(f.fn().body[1].rhs.cast, CastKind::Zext);
  EXPECT_EQ(f.fn().body[2].rhs.cast, CastKind::Trunc);
}

TEST(HirCheck, DirectivesOverrideAndRename) {
  const char *src = "void f(int a[2], int b[2]){ b[0] = a[0]; b[1] = a[1]; }";
  ValidatedFunction f = checkSource(src, {{"b", std::nullopt, true, std::string("out")}});
  EXPECT_EQ(var(f, "out").dir, ParamDir::Out);
  EXPECT_TRUE(var(f, "out").splitPort);
  std::vector<std::string> warnings;
  HirProgram p = parseMiniC(src);
  applyDirectives(p.functions[0], {{"nope", ParamDir::In, false, std::nullopt}}, &warnings);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("nope"), std::string::npos);
}

TEST(HirCheck, ExplicitOutputNeverWritten) {
  try {
    checkSource("void f(int a, int &x, int &y){ x = a; }", {{"y", ParamDir::Out, false, std::nullopt}});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnassignedOutput);
  }
}

TEST(HirCheck, PartialCoverageWarns) {
  ValidatedFunction f = checkSource("void f(int a, int z[4]){ z[0] = a; z[2] = a; }");
  ASSERT_EQ(f.warnings().size(), 1u);
  ValidatedFunction g = checkSource("void f(int a, int z[4]){ for (int i = 0; i < 4; i++) z[i] = a; }");
  EXPECT_TRUE(g.warnings().empty());
  ValidatedFunction h = checkSource("void f(int a, int &x){ if (a < 3) x = 1; }");
  EXPECT_EQ(h.warnings().size(), 1u);
}

TEST(HirCheck, NonTerminatingLoopOverflows) {
  EXPECT_EQ(checkError("void f(int &x){ for (unsigned char i = 0; i < 300; i++) x = x + 1; }"),
            ErrorKind::TripCountOverflow);
}

TEST(HirCheck, TripSequences) {
  HirType u8 = HirType::scalar(Signedness::Unsigned, 8);
  ForHeader down{0, 7, BinOp::Gt, 0, -1};
  EXPECT_EQ(tripSequence(down, u8), (std::vector<int64_t>{7, 6, 5, 4, 3, 2, 1}));
  ForHeader stride{0, 0, BinOp::Lt, 10, 3};
  EXPECT_EQ(tripSequence(stride, u8), (std::vector<int64_t>{0, 3, 6, 9}));
  ForHeader empty{0, 5, BinOp::Lt, 5, 1};
  EXPECT_TRUE(tripSequence(empty, u8).empty());
}

// Property: random well-formed programs check; the same program with one
// forbidden construct spliced in is rejected.
TEST(HirCheckProperty, SubsetClosure) {
  testkit::Gen g(11);
  const std::vector<std::string> forbidden = {
      "while (y < 3) { y = y + (T)1; }",
      "for (int i = 0; i < 2; i++) { break; }",
      "for (int i = 0; i < 2; i++) { continue; }",
      "goto out;",
      "y = a[0] / a[1];",
      "y = a[0] % a[1];",
      "y = b0 ? a[0] : a[1];",
      "y = 1.5;",
      "for (int i = 0; i < b0; i++) { y = a[0]; }",
      "y = a[LEN];",
      "do { y = a[0]; } while (0);",
      "switch (b0) { default: y = a[0]; }",
      "y = *a;",
  };
  for (int iter = 0; iter < 300; ++iter) {
    testkit::ProgramShape shape;
    shape.width = static_cast<unsigned>(g.range(1, 16));
    shape.isSigned = g.coin();
    shape.length = 1u << g.range(1, 2);
    testkit::ProgramGen pg(g, shape);
    auto stmts = pg.statements();
    std::string good = pg.program(stmts);
    ASSERT_NO_THROW(checkFunction(parseMiniC(good).functions.at(0))) << good;

    std::string bad = g.pick(forbidden);
    for (std::size_t pos; (pos = bad.find("(T)")) != std::string::npos;)
      bad.replace(pos, 3, "(" + pg.typeName() + ")");
    for (std::size_t pos; (pos = bad.find("LEN")) != std::string::npos;)
      bad.replace(pos, 3, std::to_string(shape.length));
    stmts.insert(stmts.begin() + static_cast<long>(g.range(2, stmts.size())), bad);
    std::string src = pg.program(stmts);
    bool rejected = false;
    try {
      checkFunction(parseMiniC(src).functions.at(0));
    } catch (const Error &e) {
      rejected = e.kind() == ErrorKind::UnsupportedConstruct || e.kind() == ErrorKind::NonConstantBound ||
                 e.kind() == ErrorKind::StaticOutOfBounds;
    }
    ASSERT_TRUE(rejected) << src;
  }
}
