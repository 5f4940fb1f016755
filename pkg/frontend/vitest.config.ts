import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    include: ["tests/**/*.test.ts"],
    // the end-to-end suite spawns and seeds the backing service
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
