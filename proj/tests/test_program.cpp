#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "tilesim/program.hpp"

using namespace tilesim;

namespace {

Program two_loads(std::vector<uint32_t>* got) {
  const uint32_t a = co_yield PEOp::load(10);
  got->push_back(a);
  const uint32_t b = co_yield PEOp::load(20);
  got->push_back(b);
  co_yield PEOp::store(30, a + b);
}

Program inner(std::vector<uint32_t>* got) {
  const uint32_t v = co_yield PEOp::amo_add(5, 1);
  got->push_back(v);
}

Program outer(std::vector<uint32_t>* got) {
  co_yield PEOp::compute(2);
  co_yield inner(got);  // splice: runs to completion in place
  const uint32_t v = co_yield PEOp::load(7);
  got->push_back(v);
}

Program empty_program() { co_return; }

Program deep(std::vector<uint32_t>* got, int depth) {
  if (depth == 0) {
    const uint32_t v = co_yield PEOp::load(uint32_t(100));
    got->push_back(v);
  } else {
    co_yield deep(got, depth - 1);
    got->push_back(uint32_t(depth));
  }
}

}  // namespace

TEST_CASE("ops stream in order and responses come back") {
  std::vector<uint32_t> got;
  Program p = two_loads(&got);
  CHECK(p.valid());
  p.start();
  REQUIRE(!p.done());
  CHECK(p.op().kind == OpKind::Load);
  CHECK(p.op().a == 10);
  p.advance(111);
  CHECK(p.op().kind == OpKind::Load);
  CHECK(p.op().a == 20);
  p.advance(222);
  CHECK(p.op().kind == OpKind::Store);
  CHECK(p.op().a == 30);
  CHECK(p.op().b == 333);  // computed from both responses
  p.advance(0);
  CHECK(p.done());
  CHECK(got == std::vector<uint32_t>{111, 222});
}

TEST_CASE("splicing runs the nested program in place") {
  std::vector<uint32_t> got;
  Program p = outer(&got);
  p.start();
  CHECK(p.op().kind == OpKind::Compute);
  p.advance(0);
  // Now inside the nested fragment.
  CHECK(p.op().kind == OpKind::AmoAdd);
  CHECK(p.op().a == 5);
  p.advance(41);
  // Back in the outer frame.
  CHECK(p.op().kind == OpKind::Load);
  CHECK(p.op().a == 7);
  p.advance(9);
  CHECK(p.done());
  CHECK(got == std::vector<uint32_t>{41, 9});
}

TEST_CASE("splices nest arbitrarily deep") {
  std::vector<uint32_t> got;
  Program p = deep(&got, 5);
  p.start();
  CHECK(p.op().kind == OpKind::Load);
  p.advance(77);
  CHECK(p.done());
  // The innermost load response, then each unwinding frame.
  CHECK(got == std::vector<uint32_t>{77, 1, 2, 3, 4, 5});
}

TEST_CASE("empty program finishes immediately") {
  Program p = empty_program();
  p.start();
  CHECK(p.done());
}

TEST_CASE("moved-from program is empty, move target runs") {
  std::vector<uint32_t> got;
  Program a = two_loads(&got);
  Program b = std::move(a);
  CHECK(!a.valid());
  b.start();
  CHECK(b.op().a == 10);
}

TEST_CASE("event ops carry kind and id") {
  const PEOp e = PEOp::event(EventKind::BarrierEnter, 42);
  CHECK(e.kind == OpKind::Event);
  CHECK(EventKind(e.a) == EventKind::BarrierEnter);
  CHECK(e.b == 42);
  CHECK(!e.is_memory());
  CHECK(PEOp::load(1).is_memory());
  CHECK(PEOp::store(1, 2).is_memory());
  CHECK(PEOp::amo_add(1, 2).is_memory());
  CHECK(!PEOp::wfi().is_memory());
}
