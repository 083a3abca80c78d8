import { describe, expect, it } from "vitest";

import { applyKey, commandMessage, emptyInput } from "../src/input.js";

const A_MAX = 0.05;

describe("commandMessage", () => {
  it("emits the saturated value while the right arrow is held", () => {
    const input = applyKey(emptyInput(), "ArrowRight", true);
    expect(commandMessage(input, A_MAX, ["x"])).toEqual({ type: "cmd", axes: { x: A_MAX } });
  });

  it("emits the negative bound for the left arrow", () => {
    const input = applyKey(emptyInput(), "ArrowLeft", true);
    expect(commandMessage(input, A_MAX, ["x"])).toEqual({ type: "cmd", axes: { x: -A_MAX } });
  });

  it("emits nothing when there is no input", () => {
    expect(commandMessage(emptyInput(), A_MAX, ["x"])).toBeNull();
  });

  it("emits nothing when opposing keys cancel", () => {
    let input = applyKey(emptyInput(), "ArrowLeft", true);
    input = applyKey(input, "ArrowRight", true);
    expect(commandMessage(input, A_MAX, ["x"])).toBeNull();
  });

  it("maps the slider proportionally", () => {
    const input = { ...emptyInput(), slider: 0.4 };
    expect(commandMessage(input, A_MAX, ["x"])).toEqual({
      type: "cmd",
      axes: { x: 0.4 * A_MAX },
    });
  });

  it("keys take precedence over the slider", () => {
    const input = { ...applyKey(emptyInput(), "ArrowRight", true), slider: -1 };
    expect(commandMessage(input, A_MAX, ["x"])).toEqual({ type: "cmd", axes: { x: A_MAX } });
  });

  it("never populates axes the user does not own", () => {
    const input = { ...applyKey(emptyInput(), "ArrowUp", true), slider: 1 };
    const msg = commandMessage(input, A_MAX, ["x"]);
    expect(msg).toEqual({ type: "cmd", axes: { x: A_MAX } });
  });

  it("supports a y-owned partition with the vertical keys", () => {
    const input = applyKey(emptyInput(), "ArrowUp", true);
    expect(commandMessage(input, A_MAX, ["y"])).toEqual({ type: "cmd", axes: { y: A_MAX } });
  });

  it("releasing a key stops the command", () => {
    let input = applyKey(emptyInput(), "ArrowRight", true);
    input = applyKey(input, "ArrowRight", false);
    expect(commandMessage(input, A_MAX, ["x"])).toBeNull();
  });
});
