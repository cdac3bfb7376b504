import { defineConfig } from "vitest/config";

export default defineConfig({
    test: {
        environment: "node",
        include: ["tests/**/*.test.ts"],
        testTimeout: 60_000,
        hookTimeout: 120_000,
        // the integration suites each boot their own service instance
        pool: "forks",
    },
});
